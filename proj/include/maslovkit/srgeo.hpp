#pragma once

// Sub-Riemannian geodesics in a global chart R^n: the normal Hamiltonian
// flow of H = 1/2 sum <p, f_i(x)>^2, Jacobi frames transported from the
// vertical, conjugate times, and a discretized end-point map.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "maslovkit/linalg.hpp"
#include "maslovkit/polynomial.hpp"

namespace maslovkit {

/// Value, Jacobian and per-component Hessians of a vector field.
struct FieldJet {
  Vec f;
  Mat df;
  std::vector<Mat> d2f;
};

class FrameStructure {
 public:
  using Field = std::function<Vec(const Vec&)>;

  /// Fields given by polynomial components in n variables; derivatives exact.
  FrameStructure(int n, std::vector<std::vector<Polynomial>> fields, std::string name);
  /// Callable fields; derivatives by central differences.
  FrameStructure(int n, std::vector<Field> fields, std::string name, double fd_step = 1e-6);

  static FrameStructure euclidean(int n);
  /// f_1 = d_x - (y/2) d_z, f_2 = d_y + (x/2) d_z on R^3.
  static FrameStructure heisenberg();
  /// "euclidean:n" or "heisenberg".
  static FrameStructure from_name(const std::string& name);

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  const std::string& name() const noexcept { return name_; }
  bool exact() const noexcept { return !poly_.empty(); }
  const std::vector<std::vector<Polynomial>>& polynomial_fields() const noexcept { return poly_; }

  Vec field(int i, const Vec& x) const;
  FieldJet field_jet(int i, const Vec& x, bool second = true) const;
  /// n x k matrix with the fields as columns.
  Mat frame(const Vec& x) const;
  /// Rank of the frame at x.
  int rank_at(const Vec& x) const;

  /// Largest relative mismatch between supplied Jacobians and differences.
  double jacobian_mismatch(const Vec& x) const;

 private:
  int n_ = 0;
  int k_ = 0;
  std::string name_;
  std::vector<std::vector<Polynomial>> poly_;
  std::vector<Field> callables_;
  double fd_step_ = 1e-6;
};

struct CotangentState {
  Vec x;
  Vec p;
};

inline constexpr int kStepsPerUnit = 2048;

double hamiltonian(const FrameStructure& s, const CotangentState& state);

/// (dH/dp, -dH/dx).
Vec hamiltonian_vector(const FrameStructure& s, const CotangentState& state);

struct Geodesic {
  std::vector<double> times;
  std::vector<CotangentState> states;
};

/// Classical RK4 with the given number of steps on [0, T].
Geodesic geodesic_flow(const FrameStructure& s, const CotangentState& start, double T, int steps);

/// x-component of the flow at time t from (x0, p0), with kStepsPerUnit steps per unit time.
Vec exponential(const FrameStructure& s, const Vec& x0, const Vec& p0, double t,
                int steps_per_unit = kStepsPerUnit);

/// u_i(t_j) = <p(t_j), f_i(x(t_j))>, one row per sample.
Mat control_from_covector(const FrameStructure& s, const Geodesic& g);

/// Integrates x' = sum u_i f_i(x) through control samples on the given times,
/// interpolating the control by local cubics.
std::vector<Vec> integrate_control(const FrameStructure& s, const Vec& x0, const std::vector<double>& times,
                                   const Mat& controls);

class JacobiSystem {
 public:
  JacobiSystem(FrameStructure s, CotangentState start, double T, int steps_per_unit = kStepsPerUnit);

  const FrameStructure& structure() const noexcept { return *s_; }
  const Geodesic& geodesic() const noexcept { return geo_; }
  /// 2n x n frames (delta x on top, delta p below), V(0) = [0; I].
  const std::vector<Mat>& frames() const noexcept { return frames_; }
  double T() const noexcept { return geo_.times.back(); }
  double step() const noexcept { return h_; }
  /// Largest |V^T J V| seen on the grid.
  double symplectic_residual() const noexcept { return residual_; }

  /// State and frame at any t in [0, T], integrated from the nearest grid point before t.
  std::pair<CotangentState, Mat> at(double t) const;
  /// det of the x-block of V(t).
  double jacobi_determinant(double t) const;

 private:
  std::shared_ptr<const FrameStructure> s_;
  Geodesic geo_;
  std::vector<Mat> frames_;
  double h_ = 0.0;
  double residual_ = 0.0;
};

struct ConjugateTime {
  double t = 0.0;
  int multiplicity = 0;
  /// det of the x-block touches zero without changing sign.
  bool tangential = false;
};

/// Zeros of det of the x-block in (0, T], bisected to 1e-8 relative.
std::vector<ConjugateTime> conjugate_times(const JacobiSystem& jacobi);
std::vector<ConjugateTime> conjugate_times(const FrameStructure& s, const Vec& x0, const Vec& p0, double T);

/// Minus the signed count of crossings of t -> V(t) with the vertical on
/// [eps, T]; each conjugate time contributes its multiplicity.
int maslov_count(const JacobiSystem& jacobi);

struct EndpointMap {
  Vec x;
  Mat differential;  // n x (m k), columns ordered segment-major
};

/// End point at time 1 of x' = sum u_i f_i(x) with u constant on m equal
/// segments (u is m x k), and its forward-difference differential.
EndpointMap discretized_endpoint(const FrameStructure& s, const Vec& x0, const Mat& u, int substeps = 0);

/// Control of the geodesic from (x0, p0) rescaled to [0, 1] for time s and
/// averaged over m segments.
Mat rescaled_control(const FrameStructure& s, const Vec& x0, const Vec& p0, double time, int m);

/// Smallest eigenvalue of I - m N^T D^2(lambda . F) N, the discretized
/// Hessian of the energy minus lambda . F on the kernel N of DF at the
/// rescaled control, normalized so that the flat case gives 1.
double restricted_hessian_min_eig(const FrameStructure& s, const Vec& x0, const Vec& p0, double time, int m);

}  // namespace maslovkit
