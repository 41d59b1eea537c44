#pragma once

// Symplectic linear algebra on R^{2n} with coordinates (x_1..x_n, p_1..p_n)
// and sigma(v, w) = x_v . p_w - p_v . x_w.  Pi is the x-block, Delta the p-block.

#include <functional>

#include "maslovkit/errors.hpp"
#include "maslovkit/linalg.hpp"

namespace maslovkit {

class SymplecticSpace {
 public:
  explicit SymplecticSpace(int n);

  int n() const noexcept { return n_; }
  int dim() const noexcept { return 2 * n_; }
  const Mat& form() const noexcept { return J_; }

  bool operator==(const SymplecticSpace& o) const noexcept { return n_ == o.n_; }

 private:
  int n_;
  Mat J_;
};

/// A 2n x n full-rank array whose columns span a Lagrangian subspace.
/// Columns are stored as given; rank decisions use an orthonormalized copy.
class LagrangianFrame {
 public:
  /// Validates shape, rank and the Lagrangian condition (relative to the
  /// orthonormalized columns) and throws on failure.
  explicit LagrangianFrame(Mat columns, double tol = 1e-8);

  /// Shape check only; used where Lagrangianity is known by construction.
  static LagrangianFrame unchecked(Mat columns);

  int n() const noexcept { return static_cast<int>(columns_.cols()); }
  const Mat& columns() const noexcept { return columns_; }
  auto x_block() const { return columns_.topRows(n()); }
  auto p_block() const { return columns_.bottomRows(n()); }

  /// Orthonormal basis of the same plane.
  Mat orthonormal() const;

  /// Same plane, new basis: columns * g.
  LagrangianFrame rebased(const Mat& g) const;

  /// Image under a 2n x 2n (symplectic) matrix.
  LagrangianFrame transformed(const Mat& t) const;

 private:
  struct Unchecked {};
  LagrangianFrame(Mat columns, Unchecked);
  Mat columns_;
};

/// Pi: the x-block coordinate plane.
LagrangianFrame pi_frame(int n);
/// Delta: the p-block coordinate plane.
LagrangianFrame delta_frame(int n);
/// The plane e^{i theta} Pi: each (x_j, p_j) pair rotated by theta.
LagrangianFrame rotated_pi(int n, double theta);

/// True iff frame has rank n and its orthonormalized columns satisfy
/// ||Q^T J Q|| <= tol.  Throws Shape if frame is not 2n x n.
bool is_lagrangian(const Mat& frame, double tol = 1e-8);

/// 2n - rank[f1 | f2], computed on orthonormalized columns.
int intersection_dimension(const LagrangianFrame& f1, const LagrangianFrame& f2,
                           double tol = kRankTol);

/// dim(A ∩ B) for arbitrary column spans in the same ambient space.
int subspace_intersection_dimension(const Mat& a, const Mat& b, double tol = kRankTol);

/// Smallest singular value of [Q1 | Q2] for orthonormalized frames; zero iff
/// the planes meet.
double transversality_margin(const LagrangianFrame& f1, const LagrangianFrame& f2);

/// A symplectic coordinate system R^{2n} = base ⊕ vertical made of two
/// transversal Lagrangian planes.  Charts are graphs over base into vertical.
class Splitting {
 public:
  /// Standard splitting: base Pi, vertical Delta.
  static Splitting standard(int n);

  /// Throws NotInChart if base and vertical meet.
  Splitting(const LagrangianFrame& base, const LagrangianFrame& vertical);

  int n() const noexcept { return static_cast<int>(basis_.cols() / 2); }
  /// Symplectic matrix whose first n columns span base, last n span vertical.
  const Mat& basis() const noexcept { return basis_; }
  const Mat& inverse() const noexcept { return inverse_; }

  /// Coordinates of a frame in this splitting.
  Mat coordinates(const Mat& columns) const { return inverse_ * columns; }

 private:
  explicit Splitting(Mat basis);
  Mat basis_;
  Mat inverse_;
};

/// The plane {(x, S x)} in a given splitting.
class SymmetricChart {
 public:
  explicit SymmetricChart(const Mat& s);

  int n() const noexcept { return static_cast<int>(S_.rows()); }
  const Mat& S() const noexcept { return S_; }

 private:
  Mat S_;
};

/// Frame [I; S] in standard coordinates, or its image under the splitting.
LagrangianFrame frame_from_chart(const SymmetricChart& chart);
LagrangianFrame frame_from_chart(const SymmetricChart& chart, const Splitting& splitting);

/// Throws NotInChart when the plane meets the splitting's vertical.
SymmetricChart chart_from_frame(const LagrangianFrame& frame, double tol = kRankTol);
SymmetricChart chart_from_frame(const LagrangianFrame& frame, const Splitting& splitting,
                                double tol = kRankTol);

/// Quadratic form on the plane `base` in the basis given by base's columns.
struct TangentForm {
  LagrangianFrame base;
  Mat q;
};

using FramePath = std::function<LagrangianFrame(double)>;

inline constexpr double kTangentStep = 1e-5;

/// Central-difference velocity of the chart at t0, pulled back to the basis
/// of curve(t0): q = X^T Sdot X where curve(t0) = [I; S] X in the splitting.
TangentForm tangent_form(const FramePath& curve, double t0, double h = kTangentStep);
TangentForm tangent_form(const FramePath& curve, double t0, const Splitting& splitting,
                         double h = kTangentStep);

/// (A^T S A)(I + B A^T S A)^{-1}; throws ChartBoundary when I + B A^T S A is singular.
Mat change_chart(const Mat& S, const Mat& A, const Mat& B);

/// Block matrix [[A^{-1}, B A^T], [0, A^T]] realizing change_chart on frames.
Mat chart_change_transform(const Mat& A, const Mat& B);

/// Local model of L(n) near lam0 as quadratic forms on lam0 ∩ delta.
/// For nearby P: nullity(phi(P)) = dim(P ∩ delta), and d phi restricts the
/// tangent form to lam0 ∩ delta.
class LocalSubmersion {
 public:
  LocalSubmersion(const LagrangianFrame& lam0, const LagrangianFrame& delta,
                  const LagrangianFrame& complement, double tol = kRankTol);

  int k() const noexcept { return static_cast<int>(kernel_.cols()); }

  /// Chart of the plane in the splitting delta ⊕ complement.
  Mat chart(const LagrangianFrame& plane) const;

  /// Schur complement of chart(plane) onto the kernel of chart(lam0).
  Mat operator()(const LagrangianFrame& plane) const;
  Mat from_chart(const Mat& chart) const;

  /// Nullity of phi(plane), thresholded against the scale of the base chart.
  int kernel_dimension(const LagrangianFrame& plane) const;

  const Splitting& splitting() const noexcept { return splitting_; }
  /// Orthonormal basis, in chart coordinates, of ker chart(lam0) ≅ lam0 ∩ delta.
  const Mat& kernel_basis() const noexcept { return kernel_; }
  const Mat& kernel_complement() const noexcept { return complement_basis_; }
  const Mat& base_chart() const noexcept { return s0_; }

 private:
  Splitting splitting_;
  Mat s0_;
  Mat kernel_;
  Mat complement_basis_;
  double tol_;
};

/// dim(frame ∩ delta), the stratum label r with frame in Z_r.
int stratum_index(const LagrangianFrame& frame, const LagrangianFrame& delta,
                  double tol = kRankTol);

}  // namespace maslovkit
