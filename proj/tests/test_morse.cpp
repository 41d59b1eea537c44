#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "maslovkit/errors.hpp"
#include "maslovkit/morse.hpp"

using namespace maslovkit;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Roots of d_x f(t, .) in the box from a grid of Newton starts.
std::vector<Vec> brute_force_roots(const MorseFamily& f, double t, int starts_per_axis) {
  const int n = f.n();
  const Box& b = f.box();
  std::vector<Vec> roots;
  const int total = static_cast<int>(std::pow(starts_per_axis, n));
  for (int k = 0; k < total; ++k) {
    Vec x(n);
    int r = k;
    for (int i = 0; i < n; ++i) {
      x(i) = b.x_min + (b.x_max - b.x_min) * (0.5 + r % starts_per_axis) / starts_per_axis;
      r /= starts_per_axis;
    }
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      const Jet j = f.jet(t, x);
      if (j.fx.norm() < 1e-13) {
        ok = true;
        break;
      }
      Eigen::FullPivLU<Mat> lu(j.fxx);
      if (!lu.isInvertible()) break;
      x -= lu.solve(j.fx);
    }
    if (!ok || !b.contains(t, x)) continue;
    bool fresh = true;
    for (const auto& y : roots) fresh = fresh && (y - x).norm() > 1e-7;
    if (fresh) roots.push_back(x);
  }
  return roots;
}

}  // namespace

TEST_CASE("residual examples") {
  const auto quad = quadratic_family();
  CHECK(residual(quad, 1.0, 0.3, v1(0.0)).norm() < 1e-15);
  const auto cubic = cubic_fold_family();
  for (double t : {0.3, 1.2, 3.0}) {
    const double x = std::sqrt(t / 3);
    CHECK(residual(cubic, -x, t, v1(x)).norm() < 1e-14);
    CHECK(residual(cubic, x, t, v1(-x)).norm() < 1e-14);
  }
  CHECK(residual(cubic, 0.4, 0.7, v1(0.2)).norm() > 0.1);
}

TEST_CASE("morse regularity examples") {
  CHECK(morse_regularity(quadratic_family(), 0.2, v1(0.0)));
  CHECK(morse_regularity(cubic_fold_family(), 0.0, v1(0.0)));
  const MorseFamily quartic(1, Polynomial(2, {{1.0, {0, 4}}}), Box{});
  CHECK_FALSE(morse_regularity(quartic, 0.0, v1(0.0)));
}

TEST_CASE("derivatives agree with finite differences") {
  std::mt19937_64 rng(5);
  CHECK(derivative_mismatch(cubic_fold_family(), 20, rng) < 1e-4);
  CHECK(derivative_mismatch(fold_normal_form(3, 0.5, -1, {1, -1}), 20, rng) < 1e-4);
  const MorseFamily numeric(2, [](double t, const Vec& x) { return std::sin(x(0)) * t + x(1) * x(1) * x(0); },
                            Box{});
  CHECK(derivative_mismatch(numeric, 20, rng) < 1e-4);
}

TEST_CASE("continuation of x^2 + t") {
  const auto f = quadratic_family();
  const auto curve = continue_curve(f, MultiplierPoint{1.0, 0.0, v1(0.0)});
  CHECK(curve.points.size() > 50);
  for (const auto& p : curve.points) {
    CHECK(std::abs(p.x(0)) < 1e-12);
    CHECK(std::abs(p.lambda - 1.0) < 1e-12);
    CHECK(p.index == 0);
  }
  CHECK(curve.left_box_forward);
  CHECK(curve.left_box_backward);
  CHECK(detect_folds(curve, f).empty());
  const auto prof = index_profile(curve, f, {});
  CHECK(prof.jumps.empty());
}

TEST_CASE("continuation through the cubic fold") {
  const auto f = cubic_fold_family();
  const auto curve = continue_curve(f, MultiplierPoint{-1.0, 3.0, v1(1.0)});
  double min_t = 1e9;
  for (const auto& p : curve.points) {
    CHECK(residual(f, p.lambda, p.t, p.x).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(3 * p.x(0) * p.x(0) - p.t) < 1e-9);
    min_t = std::min(min_t, p.t);
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    CHECK(std::hypot(std::hypot(a.t - b.t, a.lambda - b.lambda), (a.x - b.x).norm()) <= 1.05 * 0.02);
  }
  CHECK(min_t < 1e-3);
  const auto folds = detect_folds(curve, f);
  REQUIRE(folds.size() == 1);
  CHECK(std::abs(folds[0].t) <= 1e-6);
  CHECK(std::abs(folds[0].x(0)) <= 1e-6);
  const auto prof = index_profile(curve, f, folds);
  REQUIRE(prof.jumps.size() == 1);
  std::set<int> branch{prof.jumps[0].before, prof.jumps[0].after};
  CHECK(branch == std::set<int>{0, 1});
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (std::abs(p.x(0)) > 1e-6) CHECK(prof.index[i] == (p.x(0) > 0 ? 0 : 1));
  }
}

TEST_CASE("degenerate family is refused") {
  const MorseFamily cube(1, Polynomial(2, {{1.0, {0, 3}}}), Box{});
  try {
    continue_curve(cube, MultiplierPoint{0.0, 0.2, v1(0.0)});
    FAIL("expected singular multiplier");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMultiplier);
  }
}

TEST_CASE("normal form folds") {
  for (int sign : {1, -1}) {
    const auto f = fold_normal_form(2, 0.7, -1, {sign});
    const auto seed = seed_point(f, 0.75, v2(0.5, 0.3));
    const auto curve = continue_curve(f, seed);
    const auto folds = detect_folds(curve, f);
    REQUIRE(folds.size() == 1);
    CHECK(std::abs(folds[0].t) <= 1e-6);
    const auto prof = index_profile(curve, f, folds);
    REQUIRE(prof.jumps.size() == 1);
    CHECK(std::abs(prof.jumps[0].after - prof.jumps[0].before) == 1);
    const int base = sign > 0 ? 0 : 1;
    CHECK(std::set<int>{prof.jumps[0].before, prof.jumps[0].after} == std::set<int>{base, base + 1});
  }
  // t x_1 with a plus sign puts the branches at t < 0
  const auto g = fold_normal_form(1, 0.0, 1);
  const auto curve = continue_curve(g, seed_point(g, -0.75, v1(0.5)));
  const auto folds = detect_folds(curve, g);
  REQUIRE(folds.size() == 1);
  CHECK(std::abs(folds[0].t) <= 1e-6);
}

TEST_CASE("closed multiplier curve has an even number of folds") {
  const auto f = circle_family();
  // in (lambda, t, x) the curve has length about 10.5
  ContinuationOptions opt;
  opt.s_max = 20.0;
  const auto curve = continue_curve(f, seed_point(f, 0.0, v1(0.9)), opt);
  CHECK(curve.closed);
  const auto folds = detect_folds(curve, f);
  CHECK(folds.size() == 2);
  CHECK(folds.size() % 2 == 0);
  for (const auto& fd : folds) {
    CHECK(std::abs(std::abs(fd.t) - 1.0) < 1e-8);
    CHECK(std::abs(fd.x(0)) < 1e-8);
  }
  const auto prof = index_profile(curve, f, folds);
  CHECK(prof.jumps.size() == 2);
}

TEST_CASE("curve agrees with brute-force critical points") {
  for (const auto& f : {cubic_fold_family(), fold_normal_form(2, 0.0, -1, {1})}) {
    const auto curve = continue_curve(f, seed_point(f, 0.75, f.n() == 1 ? v1(0.5) : v2(0.5, 0.0)));
    for (std::size_t i = 0; i < curve.points.size(); i += 7) {
      const auto& p = curve.points[i];
      const auto roots = brute_force_roots(f, p.t, 9);
      double best = 1e9;
      for (const auto& r : roots) best = std::min(best, (r - p.x).norm());
      CHECK(best <= 1e-6);
    }
    // every brute-force root at a grid time is met by the curve
    for (double t : {0.1, 0.4, 0.8}) {
      int crossings = 0;
      for (std::size_t i = 1; i < curve.points.size(); ++i)
        if ((curve.points[i - 1].t - t) * (curve.points[i].t - t) < 0) ++crossings;
      CHECK(crossings == static_cast<int>(brute_force_roots(f, t, 9).size()));
    }
  }
}
