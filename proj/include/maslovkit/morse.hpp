#pragma once

// One-parameter Morse families f_t(x): the multiplier curve
// {lambda = d_t f, d_x f = 0}, its continuation through folds, and the
// Morse index along it.

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "maslovkit/linalg.hpp"
#include "maslovkit/polynomial.hpp"

namespace maslovkit {

/// Value and derivatives of f at (t, x).
struct Jet {
  double f = 0.0;
  double ft = 0.0;
  double ftt = 0.0;
  Vec fx;
  Vec ftx;
  Mat fxx;
};

struct Box {
  double t_min = -1.0, t_max = 1.0;
  double x_min = -1.0, x_max = 1.0;  // per coordinate
  bool contains(double t, const Vec& x) const;
};

class MorseFamily {
 public:
  using Scalar = std::function<double(double, const Vec&)>;

  /// Polynomial in (t, x_1, ..., x_n), t first; derivatives are exact.
  MorseFamily(int n, Polynomial f, Box box, std::string name = "polynomial");
  /// Arbitrary callable; derivatives by central differences with step fd_step.
  MorseFamily(int n, Scalar f, Box box, std::string name = "callable", double fd_step = 1e-4);

  int n() const noexcept { return n_; }
  const Box& box() const noexcept { return box_; }
  const std::string& name() const noexcept { return name_; }
  bool exact() const noexcept { return static_cast<bool>(poly_); }
  const Polynomial* polynomial() const noexcept { return poly_.get(); }

  double value(double t, const Vec& x) const;
  Jet jet(double t, const Vec& x) const;

 private:
  int n_;
  std::shared_ptr<const Polynomial> poly_;
  Scalar f_;
  Box box_;
  std::string name_;
  double fd_step_ = 1e-4;
};

/// x^3 - t x on the box |t| <= 1, |x| <= 1.
MorseFamily cubic_fold_family();
/// x^2 + t.
MorseFamily quadratic_family();
/// c0 + x_1^3 + t_sign t x_1 + sum_{i >= 2} signs[i - 2] x_i^2.
MorseFamily fold_normal_form(int n, double c0 = 0.0, int t_sign = -1, std::vector<int> signs = {});
/// x^3 / 3 + (t^2 - 1) x, whose multiplier curve is the circle x^2 + t^2 = 1.
MorseFamily circle_family();

/// Largest relative mismatch between the supplied derivatives and central
/// differences of f at random points of the box.
double derivative_mismatch(const MorseFamily& family, int probes, std::mt19937_64& rng);

struct MultiplierPoint {
  double lambda = 0.0;
  double t = 0.0;
  Vec x;
  double s = 0.0;
  int index = 0;
};

struct MultiplierCurve {
  std::vector<MultiplierPoint> points;
  bool closed = false;
  /// True when continuation stopped at the box in that direction.
  bool left_box_backward = false;
  bool left_box_forward = false;
};

/// (lambda - d_t f, d_x f).
Vec residual(const MorseFamily& family, double lambda, double t, const Vec& x);

/// Whether [d_tx f | d_xx f] has rank n.
bool morse_regularity(const MorseFamily& family, double t, const Vec& x, double tol = 1e-8);

/// Number of negative eigenvalues of d_xx f.
int morse_index(const MorseFamily& family, double t, const Vec& x);

struct ContinuationOptions {
  double step = 0.02;
  double s_max = 10.0;
  double tol = 1e-10;
  int max_halvings = 20;
  int newton_iterations = 25;
};

/// Pseudo-arclength continuation in both directions from the seed.
MultiplierCurve continue_curve(const MorseFamily& family, const MultiplierPoint& seed,
                               const ContinuationOptions& options = {});

/// Seed on the curve: solves d_x f(t, x) = 0 by Newton from x0 at fixed t.
MultiplierPoint seed_point(const MorseFamily& family, double t, const Vec& x0, double tol = 1e-12);

struct Fold {
  double s = 0.0;
  double t = 0.0;
  double lambda = 0.0;
  Vec x;
  /// Segment [i, i + 1] of the curve that contains the fold.
  int segment = 0;
  /// det d_xx f is near zero without changing sign.
  bool tangential = false;
};

/// Sign changes of det d_xx f along the curve, refined by bisection in s.
std::vector<Fold> detect_folds(const MultiplierCurve& curve, const MorseFamily& family,
                               double s_tol = 1e-10);

struct IndexJump {
  double s = 0.0;
  int before = 0;
  int after = 0;
};

struct IndexProfile {
  std::vector<int> index;
  std::vector<IndexJump> jumps;
};

/// Morse index at every curve point; checks constancy between folds and a
/// jump of exactly one across each fold.
IndexProfile index_profile(const MultiplierCurve& curve, const MorseFamily& family,
                           const std::vector<Fold>& folds);

}  // namespace maslovkit
