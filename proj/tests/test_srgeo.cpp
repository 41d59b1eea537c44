#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "maslovkit/errors.hpp"
#include "maslovkit/srgeo.hpp"

using namespace maslovkit;

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Heisenberg geodesic from the origin with p0 = (a, b, theta):
// x + iy = (a + ib) g(t), z = (a^2 + b^2) h(t).
cd heis_g(double th, double t) {
  if (th == 0.0) return t;
  return (std::exp(cd(0, th * t)) - 1.0) / cd(0, th);
}
double heis_h(double th, double t) { return (th * t - std::sin(th * t)) / (2 * th * th); }

Vec heisenberg_point(const Vec& p0, double t) {
  const cd w = cd(p0(0), p0(1)) * heis_g(p0(2), t);
  return v3(w.real(), w.imag(), (p0(0) * p0(0) + p0(1) * p0(1)) * heis_h(p0(2), t));
}

// d(exp)/d(p0) of the closed form above.
Mat heisenberg_exp_jacobian(const Vec& p0, double t) {
  const double a = p0(0), b = p0(1), th = p0(2);
  const cd e = std::exp(cd(0, th * t));
  const cd g = heis_g(th, t);
  const cd g_th = (th * t * e + cd(0, 1) * (e - 1.0)) / (th * th);
  const double h = heis_h(th, t);
  const double h_th = (t - t * std::cos(th * t)) / (2 * th * th) - (th * t - std::sin(th * t)) / (th * th * th);
  const cd zeta(a, b);
  Mat m(3, 3);
  m << g.real(), -g.imag(), (zeta * g_th).real(),  //
      g.imag(), g.real(), (zeta * g_th).imag(),    //
      2 * a * h, 2 * b * h, (a * a + b * b) * h_th;
  return m;
}

// Heisenberg with small polynomial terms added to the z components.
FrameStructure perturbed_heisenberg(double eps) {
  const Polynomial one = Polynomial::constant(3, 1.0), zero(3);
  const Polynomial x = Polynomial::variable(3, 0), y = Polynomial::variable(3, 1);
  return FrameStructure(3, {{one, zero, y * -0.5 + x * x * eps}, {zero, one, x * 0.5 + y * x * (-eps)}},
                        "perturbed");
}

}  // namespace

TEST_CASE("hamiltonian examples") {
  const auto e = FrameStructure::euclidean(3);
  CHECK(hamiltonian(e, {v3(1, 2, 3), v3(1, -2, 2)}) == doctest::Approx(4.5));
  const auto h = FrameStructure::heisenberg();
  CHECK(hamiltonian(h, {Vec::Zero(3), v3(1, 2, 5)}) == doctest::Approx(2.5));
  CHECK(hamiltonian(h, {Vec::Zero(3), v3(0, 0, 1)}) == 0.0);
  CHECK(FrameStructure::from_name("euclidean:4").n() == 4);
  CHECK(FrameStructure::from_name("heisenberg").k() == 2);
  CHECK_THROWS_AS(FrameStructure::from_name("sphere"), Error);
  CHECK(h.rank_at(Vec::Zero(3)) == 2);
  CHECK(h.jacobian_mismatch(v3(0.3, -0.7, 2.0)) < 1e-5);
}

TEST_CASE("callable fields match polynomial fields") {
  const FrameStructure poly = perturbed_heisenberg(0.3);
  const double eps = 0.3;
  const FrameStructure call(
      3,
      {[eps](const Vec& x) { return v3(1, 0, -0.5 * x(1) + eps * x(0) * x(0)); },
       [eps](const Vec& x) { return v3(0, 1, 0.5 * x(0) - eps * x(0) * x(1)); }},
      "callable");
  const Vec x = v3(0.4, -0.2, 0.1), p = v3(0.3, 0.8, 1.5);
  CHECK(call.jacobian_mismatch(x) < 1e-5);
  CHECK((hamiltonian_vector(call, {x, p}) - hamiltonian_vector(poly, {x, p})).norm() < 1e-7);
  const JacobiSystem a(poly, {x, p}, 1.0), b(call, {x, p}, 1.0);
  CHECK((a.frames().back() - b.frames().back()).norm() < 1e-4);
}

TEST_CASE("geodesic flow") {
  const auto e = FrameStructure::euclidean(2);
  Vec x0(2), p0(2);
  x0 << 1, -1;
  p0 << 0.3, 2;
  const auto g = geodesic_flow(e, {x0, p0}, 2.0, 50);
  for (std::size_t i = 0; i < g.times.size(); ++i)
    CHECK((g.states[i].x - (x0 + g.times[i] * p0)).norm() < 1e-13);

  const auto h = FrameStructure::heisenberg();
  for (double th : {1.0, -2.0, 2 * kPi}) {
    const Vec p = v3(1, 0, th);
    const auto geo = geodesic_flow(h, {Vec::Zero(3), p}, 2.0, 4096);
    const double h0 = hamiltonian(h, geo.states.front());
    for (std::size_t i = 0; i < geo.times.size(); i += 64) {
      const Vec& x = geo.states[i].x;
      // circle of radius 1/|theta| through the origin, centred at (0, 1/theta)
      CHECK(std::abs(std::hypot(x(0), x(1) - 1 / th) - 1 / std::abs(th)) < 1e-9);
      CHECK((x - heisenberg_point(p, geo.times[i])).norm() < 1e-9);
      CHECK(std::abs(hamiltonian(h, geo.states[i]) - h0) <= 1e-8 * h0);
    }
  }
}

TEST_CASE("fourth-order energy drift") {
  const auto s = perturbed_heisenberg(0.4);
  const CotangentState start{v3(0.1, 0.2, 0), v3(0.7, -0.4, 3.0)};
  const double h0 = hamiltonian(s, start);
  auto drift = [&](int steps) {
    const auto g = geodesic_flow(s, start, 2.0, steps);
    return std::abs(hamiltonian(s, g.states.back()) - h0) / h0;
  };
  CHECK(drift(4096) <= 1e-8);
  CHECK(drift(64) >= 8 * drift(128));
}

TEST_CASE("exponential map") {
  const auto h = FrameStructure::heisenberg();
  CHECK(exponential(h, v3(1, 2, 3), v3(1, 1, 1), 0.0) == v3(1, 2, 3));
  const auto e = FrameStructure::euclidean(3);
  CHECK((exponential(e, v3(1, 2, 3), v3(1, -1, 0.5), 1.5) - v3(2.5, 0.5, 3.75)).norm() < 1e-13);
  const Vec end = exponential(h, Vec::Zero(3), v3(1, 0, 2 * kPi), 1.0);
  CHECK(std::hypot(end(0), end(1)) < 1e-9);
  CHECK(std::abs(end(2) - 1 / (4 * kPi)) < 1e-6);

  std::mt19937_64 rng(12);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec p0 = v3(gauss(rng), gauss(rng), 3 * gauss(rng));
    const Vec x0 = v3(gauss(rng), gauss(rng), gauss(rng));
    for (double s : {0.5, 2.0})
      CHECK((exponential(h, x0, s * p0, 0.8) - exponential(h, x0, p0, 0.8 * s)).norm() < 1e-7);
  }
}

TEST_CASE("control from covector") {
  const auto e = FrameStructure::euclidean(2);
  Vec p0(2);
  p0 << 0.5, -1.5;
  const Mat ue = control_from_covector(e, geodesic_flow(e, {Vec::Zero(2), p0}, 1.0, 32));
  for (Eigen::Index j = 0; j < ue.rows(); ++j) CHECK((ue.row(j).transpose() - p0).norm() < 1e-14);

  const auto h = FrameStructure::heisenberg();
  const CotangentState start{v3(0.2, -0.1, 0.3), v3(0.6, 0.8, 4.0)};
  const auto g = geodesic_flow(h, start, 1.5, 3072);
  const Mat u = control_from_covector(h, g);
  const double speed = std::sqrt(2 * hamiltonian(h, start));
  for (Eigen::Index j = 0; j < u.rows(); ++j) CHECK(std::abs(u.row(j).norm() - speed) < 1e-8);
  const auto xs = integrate_control(h, start.x, g.times, u);
  double worst = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) worst = std::max(worst, (xs[j] - g.states[j].x).norm());
  CHECK(worst < 1e-6);

  const auto still = geodesic_flow(h, {v3(1, 1, 1), Vec::Zero(3)}, 1.0, 16);
  CHECK(control_from_covector(h, still).norm() == 0.0);
  for (const auto& st : still.states) CHECK(st.x == v3(1, 1, 1));
}

TEST_CASE("Jacobi frames") {
  const auto e = FrameStructure::euclidean(2);
  const JacobiSystem je(e, {Vec::Zero(2), Vec::Ones(2)}, 2.0);
  CHECK(je.frames().front().topRows(2).isZero());
  CHECK(je.frames().front().bottomRows(2).isIdentity());
  for (std::size_t i = 0; i < je.frames().size(); i += 100) {
    const double t = je.geodesic().times[i];
    CHECK((je.frames()[i].topRows(2) - t * Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((je.frames()[i].bottomRows(2) - Mat::Identity(2, 2)).norm() < 1e-12);
  }

  const auto h = FrameStructure::heisenberg();
  for (const Vec& p0 : {v3(1, 0, 1), v3(0.6, -0.8, 2 * kPi), v3(2, 1, -3)}) {
    const JacobiSystem j(h, {Vec::Zero(3), p0}, 1.3 * 2 * kPi / std::abs(p0(2)));
    CHECK(j.symplectic_residual() <= 1e-7);
    for (double frac : {0.17, 0.5, 0.93, 1.21}) {
      const double t = frac * 2 * kPi / std::abs(p0(2));
      const Mat xb = j.at(t).second.topRows(3);
      CHECK((xb - heisenberg_exp_jacobian(p0, t)).norm() < 1e-7 * std::max(1.0, xb.norm()));
    }
  }
}

TEST_CASE("conjugate times") {
  const auto e = FrameStructure::euclidean(3);
  CHECK(conjugate_times(e, Vec::Zero(3), v3(1, 2, -1), 10.0).empty());
  const auto h = FrameStructure::heisenberg();
  for (double th : {1.0, 2.0, 2 * kPi}) {
    const double expected = 2 * kPi / th;
    const auto ct = conjugate_times(h, Vec::Zero(3), v3(1, 0, th), 1.2 * expected);
    REQUIRE(ct.size() == 1);
    CHECK(std::abs(ct[0].t - expected) <= 1e-4 * expected);
    CHECK(ct[0].multiplicity == 1);
    CHECK_FALSE(ct[0].tangential);
  }
  CHECK(conjugate_times(h, Vec::Zero(3), v3(1, 0, 0), 10.0).empty());
  // theta t runs through 2 pi k and twice the positive roots of tan(r) = r
  const double r1 = 4.493409457909064, r2 = 7.725251836937707;
  const auto all = conjugate_times(h, Vec::Zero(3), v3(0, 1, 2 * kPi), 2.5);
  REQUIRE(all.size() == 4);
  const double expected[] = {1.0, r1 / kPi, 2.0, r2 / kPi};
  for (int i = 0; i < 4; ++i) CHECK(all[i].t == doctest::Approx(expected[i]).epsilon(1e-6));
}

TEST_CASE("Maslov count along Jacobi curves") {
  const auto h = FrameStructure::heisenberg();
  CHECK(maslov_count(JacobiSystem(FrameStructure::euclidean(2), {Vec::Zero(2), Vec::Ones(2)}, 5.0)) == 0);
  CHECK(maslov_count(JacobiSystem(h, {Vec::Zero(3), v3(1, 0, 2 * kPi)}, 1.2)) == 1);
  CHECK(maslov_count(JacobiSystem(h, {Vec::Zero(3), v3(1, 0, 2 * kPi)}, 0.97)) == 0);
  CHECK(maslov_count(JacobiSystem(h, {Vec::Zero(3), v3(1, 0, 2 * kPi)}, 1.5)) == 2);
  CHECK(maslov_count(JacobiSystem(h, {Vec::Zero(3), v3(1, 0, 2 * kPi)}, 2.5)) == 4);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 4; ++trial) {
    const auto s = perturbed_heisenberg(0.2 * gauss(rng));
    const CotangentState start{v3(0.1 * gauss(rng), 0.1 * gauss(rng), 0), v3(gauss(rng), gauss(rng), 4 + gauss(rng))};
    const JacobiSystem j(s, start, 3.3);
    int total = 0;
    for (const auto& c : conjugate_times(j)) total += c.multiplicity;
    CHECK(maslov_count(j) == total);
  }
}

TEST_CASE("discretized end-point map") {
  const auto h = FrameStructure::heisenberg();
  const Vec x0 = v3(0.5, -0.5, 1.0);
  const auto at_zero = discretized_endpoint(h, x0, Mat::Zero(8, 2));
  CHECK(at_zero.x == x0);
  CHECK(numerical_rank(at_zero.differential, 1e-6) == 2);

  const auto e = FrameStructure::euclidean(2);
  Mat u(4, 2);
  u << 1, 2, -1, 0, 3, 1, 0.5, 0.5;
  const auto ee = discretized_endpoint(e, Vec::Zero(2), u);
  CHECK((ee.x - u.colwise().mean().transpose()).norm() < 1e-13);
  CHECK_THROWS_AS(discretized_endpoint(e, Vec::Zero(2), Mat::Zero(40, 2)), Error);

  // Piecewise-constant controls converge to the geodesic at second order in 1/m.
  const Vec p0 = v3(1, 0, 0.2);
  const Vec target = exponential(h, Vec::Zero(3), p0, 1.0);
  const double e16 = (discretized_endpoint(h, Vec::Zero(3), rescaled_control(h, Vec::Zero(3), p0, 1.0, 16)).x - target).norm();
  const double e32 = (discretized_endpoint(h, Vec::Zero(3), rescaled_control(h, Vec::Zero(3), p0, 1.0, 32)).x - target).norm();
  CHECK(e32 < 2e-5);
  CHECK(e16 / e32 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("restricted Hessian") {
  const auto e = FrameStructure::euclidean(2);
  for (int m : {4, 8, 16}) CHECK(restricted_hessian_min_eig(e, Vec::Zero(2), Vec::Ones(2), 0.7, m) == doctest::Approx(1.0));
  const auto h = FrameStructure::heisenberg();
  const Vec p0 = v3(1, 0, 2 * kPi);
  CHECK(restricted_hessian_min_eig(h, Vec::Zero(3), p0, 0.5, 32) > 0.1);
  CHECK(restricted_hessian_min_eig(h, Vec::Zero(3), p0, 0.95, 32) > 0);
  CHECK(restricted_hessian_min_eig(h, Vec::Zero(3), p0, 1.05, 32) < 0);
}
