#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "maslovkit/core.hpp"
#include "test_helpers.hpp"

using namespace maslovkit;
using testing::gaussian;
using testing::random_invertible;
using testing::random_symmetric;

TEST_CASE("symplectic form conventions") {
  const Mat J = symplectic_J(3);
  CHECK((J + J.transpose()).norm() == 0.0);
  CHECK((J * J + Mat::Identity(6, 6)).norm() == 0.0);
  Vec e1 = Vec::Zero(6), f1 = Vec::Zero(6);
  e1(0) = 1;
  f1(3) = 1;
  CHECK(sigma(e1, f1) == 1.0);
  CHECK(e1.dot(J * f1) == 1.0);
}

TEST_CASE("is_lagrangian") {
  CHECK(is_lagrangian(pi_frame(3).columns()));
  CHECK(is_lagrangian(delta_frame(3).columns()));
  std::mt19937_64 rng(1);
  Mat g(4, 2);
  g << Mat::Identity(2, 2), random_symmetric(2, rng);
  CHECK(is_lagrangian(g));
  Mat a(2, 2);
  a << 1, 2, 0, 1;
  g.bottomRows(2) = a;
  CHECK_FALSE(is_lagrangian(g));
  CHECK_THROWS_AS(is_lagrangian(Mat::Zero(3, 2)), Error);
  CHECK_FALSE(is_lagrangian(Mat::Zero(4, 2)));
  CHECK_THROWS_AS(LagrangianFrame{g}, Error);
}

TEST_CASE("intersection_dimension") {
  const auto pi = pi_frame(2), delta = delta_frame(2);
  CHECK(intersection_dimension(pi, pi) == 2);
  CHECK(intersection_dimension(pi, delta) == 0);
  // Graph of diag(0, 1) over Delta (charts on planes transversal to Pi):
  // its intersection with Delta is ker S.
  Mat s(2, 2);
  s << 0, 0, 0, 1;
  const Splitting over_delta(delta, pi);
  const auto g = frame_from_chart(SymmetricChart(s), over_delta);
  Mat joined(4, 4);
  joined << g.columns(), delta.columns();
  const int oracle = testing::nullity_by_elimination(joined);
  CHECK(oracle == 1);
  CHECK(intersection_dimension(g, delta) == oracle);
  // The same S as a graph over Pi is transversal to Delta and meets Pi in ker S.
  const auto h = frame_from_chart(SymmetricChart(s));
  CHECK(intersection_dimension(h, delta) == 0);
  CHECK(intersection_dimension(h, pi) == 1);
}

TEST_CASE("stratum_index") {
  CHECK(stratum_index(delta_frame(3), delta_frame(3)) == 3);
  CHECK(stratum_index(pi_frame(3), delta_frame(3)) == 0);
  Mat s(2, 2);
  s << 1, 0, 0, 0;
  const auto g = frame_from_chart(SymmetricChart(s), Splitting(delta_frame(2), pi_frame(2)));
  CHECK(stratum_index(g, delta_frame(2)) == testing::nullity_by_elimination(s));
}

TEST_CASE("chart_from_frame") {
  CHECK(chart_from_frame(pi_frame(3)).S().norm() == 0.0);
  Mat line(2, 1);
  line << std::cos(std::numbers::pi / 4), std::sin(std::numbers::pi / 4);
  CHECK(chart_from_frame(LagrangianFrame(line)).S()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  try {
    chart_from_frame(delta_frame(2));
    FAIL("expected not-in-chart");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInChart);
  }
}

TEST_CASE("chart round trip and basis invariance") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const Mat s = random_symmetric(n, rng);
    const auto frame = frame_from_chart(SymmetricChart(s));
    CHECK((chart_from_frame(frame).S() - s).norm() <= 1e-10 * std::max(1.0, s.norm()));
    const Mat g = random_invertible(n, rng);
    const auto rebased = frame.rebased(g);
    CHECK((chart_from_frame(rebased).S() - s).norm() <= 1e-9 * std::max(1.0, s.norm()));
    CHECK(intersection_dimension(rebased, frame) == n);
    CHECK(intersection_dimension(rebased, delta_frame(n)) == intersection_dimension(frame, delta_frame(n)));
  }
}

TEST_CASE("tangent_form") {
  const FramePath constant = [](double) { return pi_frame(2); };
  CHECK(tangent_form(constant, 0.3).q.norm() < 1e-12);
  const FramePath linear = [](double t) { return frame_from_chart(SymmetricChart(t * Mat::Identity(3, 3))); };
  CHECK((tangent_form(linear, 0.0).q - Mat::Identity(3, 3)).norm() < 1e-8);
  const FramePath rotation = [](double t) { return rotated_pi(1, t); };
  // S(t) = tan t, dS/dt(0) = 1
  CHECK(tangent_form(rotation, 0.0).q(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  // at t0 = 0.4 the basis vector (cos, sin) gives X = cos t0, and q = cos^2 * sec^2 = 1
  CHECK(tangent_form(rotation, 0.4).q(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  const FramePath bad = [](double t) { return rotated_pi(1, std::numbers::pi / 2 + t); };
  CHECK_THROWS_AS(tangent_form(bad, 0.0), Error);
}

TEST_CASE("tangent form is intrinsic across splittings") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const Mat s0 = random_symmetric(n, rng), s1 = random_symmetric(n, rng);
    const FramePath path = [=](double t) {
      return frame_from_chart(SymmetricChart(s0 + t * s1 + t * t * s0));
    };
    const Mat psi = cayley_symplectic(0.3 * random_symmetric(2 * n, rng));
    const Splitting other(pi_frame(n).transformed(psi), delta_frame(n).transformed(psi));
    const Mat q_std = tangent_form(path, 0.2).q;
    const Mat q_other = tangent_form(path, 0.2, other).q;
    CHECK((q_std - q_other).norm() <= 1e-6 * std::max(1.0, q_std.norm()));
  }
}

TEST_CASE("change_chart") {
  std::mt19937_64 rng(3);
  const Mat s = random_symmetric(3, rng);
  CHECK((change_chart(s, Mat::Identity(3, 3), Mat::Zero(3, 3)) - s).norm() < 1e-14);
  CHECK(change_chart(Mat::Zero(3, 3), random_invertible(3, rng), random_symmetric(3, rng)).norm() == 0.0);
  // frame-level oracle
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const Mat S = random_symmetric(n, rng), A = random_invertible(n, rng), B = random_symmetric(n, rng);
    const Mat T = chart_change_transform(A, B);
    CHECK((T.transpose() * symplectic_J(n) * T - symplectic_J(n)).norm() < 1e-9 * T.squaredNorm());
    const Mat oracle = chart_from_frame(frame_from_chart(SymmetricChart(S)).transformed(T)).S();
    const Mat got = change_chart(S, A, B);
    CHECK((got - oracle).norm() <= 1e-9 * std::max(1.0, oracle.norm()));
    CHECK(is_lagrangian(frame_from_chart(SymmetricChart(S)).transformed(T).columns()));
  }
  // boundary: B = -(A^T S A)^{-1} makes I + B A^T S A vanish
  const Mat A = Mat::Identity(2, 2), S2 = Mat::Identity(2, 2);
  try {
    change_chart(S2, A, -S2);
    FAIL("expected chart boundary");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ChartBoundary);
  }
}

TEST_CASE("local submersion") {
  std::mt19937_64 rng(5);
  const int n = 4;
  const auto delta = delta_frame(n), pi = pi_frame(n);
  // base plane meeting delta in a k-dimensional space: graph over delta of
  // S0 with a k-dimensional kernel
  for (int k = 1; k <= 3; ++k) {
    const Mat O = Eigen::HouseholderQR<Mat>(gaussian(n, n, rng)).householderQ();
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = i < k ? 0.0 : 1.0 + i;
    const Mat S0 = O * d.asDiagonal() * O.transpose();
    const Splitting over_delta(delta, pi);
    const auto lam0 = frame_from_chart(SymmetricChart(S0), over_delta);
    const LocalSubmersion phi(lam0, delta, pi);
    REQUIRE(phi.k() == k);
    CHECK(phi.kernel_dimension(lam0) == k);

    // d phi applied to a chart velocity equals its restriction to lam0 ∩ delta
    const Mat Sdot = random_symmetric(n, rng);
    const double h = 1e-6;
    const Mat fd = (phi.from_chart(S0 + h * Sdot) - phi.from_chart(S0 - h * Sdot)) / (2 * h);
    const Mat K = phi.kernel_basis();
    CHECK((fd - K.transpose() * Sdot * K).norm() < 1e-6);
  }
}

TEST_CASE("local submersion kernel identity on random nearby planes") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, 100);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    const int k = 1 + pick(rng) % n;
    const auto delta = delta_frame(n), pi = pi_frame(n);
    const Mat O = Eigen::HouseholderQR<Mat>(gaussian(n, n, rng)).householderQ();
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = i < k ? 0.0 : (i % 2 ? -1.0 : 1.0) * (1.0 + i);
    const Mat S0 = O * d.asDiagonal() * O.transpose();
    const Splitting over_delta(delta, pi);
    const LocalSubmersion phi(frame_from_chart(SymmetricChart(S0), over_delta), delta, pi);
    const int r = pick(rng) % (k + 1);
    Eigen::SelfAdjointEigenSolver<Mat> eig(S0 + random_symmetric(n, rng, 0.05));
    Vec ev = eig.eigenvalues();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(ev(a)) < std::abs(ev(b)); });
    for (int i = 0; i < r; ++i) ev(order[i]) = 0.0;
    const Mat Sp = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    const auto plane = frame_from_chart(SymmetricChart(Sp), over_delta);
    CHECK(phi.kernel_dimension(plane) == intersection_dimension(plane, delta));
    CHECK(intersection_dimension(plane, delta) == r);
    ++checked;
  }
  CHECK(checked == 100);
}
