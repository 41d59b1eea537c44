#pragma once

// Loops in L(n), the train of a fixed plane Delta, and the Maslov index by
// det^2 winding and by signed transversal crossings.

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "maslovkit/core.hpp"

namespace maslovkit {

/// Samples (t_i, frame_i) of a path in L(n), optionally backed by the exact
/// path so that refinement and bisection evaluate it instead of
/// interpolating charts.  Closed loops identify t_begin with t_end.
class LagrangianLoop {
 public:
  LagrangianLoop(std::vector<double> params, std::vector<LagrangianFrame> frames, bool closed,
                 FramePath path = {});

  /// Uniform samples of path on [t0, t1].
  static LagrangianLoop from_path(FramePath path, int samples, bool closed, double t0 = 0.0,
                                  double t1 = 1.0);

  int n() const noexcept { return frames_.front().n(); }
  std::size_t size() const noexcept { return params_.size(); }
  bool closed() const noexcept { return closed_; }
  bool has_path() const noexcept { return static_cast<bool>(path_); }
  double t_begin() const noexcept { return params_.front(); }
  double t_end() const noexcept { return params_.back(); }
  const std::vector<double>& params() const noexcept { return params_; }
  const std::vector<LagrangianFrame>& frames() const noexcept { return frames_; }

  /// Plane at parameter t.  Closed loops wrap t into [t_begin, t_end].
  /// Without a backing path, charts of the neighbouring samples are
  /// interpolated linearly in a splitting transversal to both.
  LagrangianFrame at(double t) const;

  /// Parameter wrapped into [t_begin, t_end) for closed loops, clamped otherwise.
  double wrap(double t) const;

  /// Same loop traversed backwards on the same parameter interval.
  LagrangianLoop reversed() const;

  /// Inserts a midpoint into every interval flagged in `split`
  /// (size() - 1 flags); all intervals when empty.
  LagrangianLoop refined(const std::vector<bool>& split = {}) const;

 private:
  std::vector<double> params_;
  std::vector<LagrangianFrame> frames_;
  bool closed_;
  FramePath path_;
};

/// Largest principal angle between two planes.
double max_principal_angle(const LagrangianFrame& a, const LagrangianFrame& b);

/// Maximum number of samples any automatic refinement may produce.
inline constexpr std::size_t kMaxLoopSamples = std::size_t{1} << 20;

/// Refines until consecutive planes are within max_angle of each other.
LagrangianLoop resolve(const LagrangianLoop& loop, double max_angle = 0.39269908169872414);

/// gamma_1 followed by gamma_2 on [0, 1]; both must share their base plane.
LagrangianLoop concatenate(const LagrangianLoop& a, const LagrangianLoop& b);

/// U = X + iY for orthonormalized columns (X; Y).  Throws Invariant on
/// non-Lagrangian input.
Eigen::MatrixXcd unitary_representative(const LagrangianFrame& frame);

/// det(U)^2, an invariant of the plane.
std::complex<double> det_squared(const LagrangianFrame& frame);

struct WindingOptions {
  bool refine = true;
};

/// Total argument of det^2 around the loop divided by 2 pi, unrounded.
double winding_phase(const LagrangianLoop& loop, WindingOptions options = {});

/// Rounded winding; requires a closed loop and a residual below 0.1.
int maslov_index_winding(const LagrangianLoop& loop, WindingOptions options = {});

struct Crossing {
  double t = 0.0;
  int multiplicity = 0;
  int sign = 0;  ///< +1 or -1; 0 only while undetermined.
};

struct CrossingOptions {
  double t_tol = 1e-10;       ///< bisection width in t
  double form_tol = 1e-7;     ///< restricted tangent form below this (relative) is tangential
  double h = kTangentStep;    ///< finite-difference step for the tangent form
};

/// Parameters where the loop meets the train of delta, with multiplicity and
/// coorientation sign.  Throws NonGeneric for crossings of multiplicity >= 2
/// or loops lying inside the train.
std::vector<Crossing> find_crossings(const LagrangianLoop& loop, const LagrangianFrame& delta,
                                     CrossingOptions options = {});

/// Sign of the loop's tangent form restricted to the line frame(t) ∩ delta.
int crossing_sign(const LagrangianLoop& loop, const Crossing& crossing,
                  const LagrangianFrame& delta, CrossingOptions options = {});

/// Value of the restricted tangent form (unit kernel vector in chart coordinates).
double restricted_crossing_form(const LagrangianLoop& loop, double t, const LagrangianFrame& delta,
                                double h = kTangentStep);

int maslov_index_crossings(const LagrangianLoop& loop, const LagrangianFrame& delta,
                           CrossingOptions options = {});

struct CrossingBound {
  int abs_index = 0;
  int crossing_count = 0;
};

CrossingBound crossing_count_bound(const LagrangianLoop& loop, const LagrangianFrame& delta,
                                   CrossingOptions options = {});

/// Closed immersed plane curve on [0, 1].
struct PlaneCurve {
  std::function<Eigen::Vector2d(double)> point;
  std::function<Eigen::Vector2d(double)> tangent;
};

PlaneCurve circle_curve(double radius = 1.0);
PlaneCurve ellipse_curve(double a, double b);
/// Lemniscate of Gerono: (cos s, sin s cos s), s = 2 pi t.
PlaneCurve figure_eight_curve();

/// Loop of tangent lines in L(1) ≅ RP^1; crossings with the vertical line are
/// the vertical tangencies.  Throws NotImmersion on a vanishing tangent.
LagrangianLoop gauss_loop_from_plane_curve(const PlaneCurve& curve, int samples = 256);
LagrangianLoop gauss_loop_from_plane_curve(const std::vector<double>& params,
                                           const std::vector<Eigen::Vector2d>& tangents);

/// t -> e^{i pi t} Pi on [0, 1].
LagrangianLoop rotation_loop(int n, int samples = 64);

/// Symplectic matrix Cayley(eps * H) with H a random symmetric matrix of unit
/// Frobenius norm.
Mat random_symplectic(int n, double eps, std::mt19937_64& rng);

/// Closed loop t -> U(t) graph(S(t)) with U(t) = Q exp(i pi t K) Q^T, K an
/// integer diagonal with entries in [-max_turns, max_turns]; its index is
/// trace K.  Returns the loop and trace K.
std::pair<LagrangianLoop, int> random_closed_loop(int n, std::mt19937_64& rng, int max_turns = 2,
                                                  int samples = 128);

}  // namespace maslovkit
