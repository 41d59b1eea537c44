#include "maslovkit/core.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace maslovkit {

namespace {

void require_frame_shape(const Mat& m) {
  if (m.cols() < 1 || m.rows() != 2 * m.cols())
    throw Error(ErrorKind::Shape, "frame must be 2n x n, got " + std::to_string(m.rows()) +
                                      " x " + std::to_string(m.cols()));
}

void require_same_space(const LagrangianFrame& a, const LagrangianFrame& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::Shape, "frames live in different spaces");
}

// Smallest singular value of the x-block of orthonormalized coordinates.
double base_margin(const Mat& coords) {
  const Mat q = orthonormal_basis(coords);
  const auto n = coords.cols();
  if (q.cols() != n) return 0.0;
  return singular_values(q.topRows(n)).minCoeff();
}

}  // namespace

SymplecticSpace::SymplecticSpace(int n) : n_(n) {
  if (n < 1) throw Error(ErrorKind::Shape, "half-dimension must be positive");
  J_ = symplectic_J(n);
}

LagrangianFrame::LagrangianFrame(Mat columns, Unchecked) : columns_(std::move(columns)) {}

LagrangianFrame::LagrangianFrame(Mat columns, double tol) : columns_(std::move(columns)) {
  require_frame_shape(columns_);
  if (!is_lagrangian(columns_, tol))
    throw Error(ErrorKind::Invariant, "columns do not span a Lagrangian plane");
}

LagrangianFrame LagrangianFrame::unchecked(Mat columns) {
  require_frame_shape(columns);
  return LagrangianFrame(std::move(columns), Unchecked{});
}

Mat LagrangianFrame::orthonormal() const { return orthonormal_basis(columns_); }

LagrangianFrame LagrangianFrame::rebased(const Mat& g) const {
  if (g.rows() != n() || g.cols() != n()) throw Error(ErrorKind::Shape, "basis change must be n x n");
  if (numerical_rank(g) < n()) throw Error(ErrorKind::Invariant, "basis change is singular");
  return LagrangianFrame(columns_ * g, Unchecked{});
}

LagrangianFrame LagrangianFrame::transformed(const Mat& t) const {
  if (t.rows() != columns_.rows() || t.cols() != columns_.rows())
    throw Error(ErrorKind::Shape, "transformation must be 2n x 2n");
  return LagrangianFrame(t * columns_, Unchecked{});
}

LagrangianFrame pi_frame(int n) { return rotated_pi(n, 0.0); }

LagrangianFrame delta_frame(int n) {
  Mat c = Mat::Zero(2 * n, n);
  c.bottomRows(n).setIdentity();
  return LagrangianFrame::unchecked(std::move(c));
}

LagrangianFrame rotated_pi(int n, double theta) {
  Mat c(2 * n, n);
  c.topRows(n) = std::cos(theta) * Mat::Identity(n, n);
  c.bottomRows(n) = std::sin(theta) * Mat::Identity(n, n);
  return LagrangianFrame::unchecked(std::move(c));
}

bool is_lagrangian(const Mat& frame, double tol) {
  require_frame_shape(frame);
  const auto n = static_cast<int>(frame.cols());
  const Mat q = orthonormal_basis(frame);
  if (q.cols() != n) return false;
  return (q.transpose() * symplectic_J(n) * q).norm() <= tol;
}

int subspace_intersection_dimension(const Mat& a, const Mat& b, double tol) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::Shape, "subspaces in different spaces");
  const Mat qa = orthonormal_basis(a, tol);
  const Mat qb = orthonormal_basis(b, tol);
  Mat joined(a.rows(), qa.cols() + qb.cols());
  joined << qa, qb;
  return static_cast<int>(qa.cols() + qb.cols()) - numerical_rank(joined, tol);
}

int intersection_dimension(const LagrangianFrame& f1, const LagrangianFrame& f2, double tol) {
  require_same_space(f1, f2);
  return subspace_intersection_dimension(f1.columns(), f2.columns(), tol);
}

double transversality_margin(const LagrangianFrame& f1, const LagrangianFrame& f2) {
  require_same_space(f1, f2);
  Mat joined(2 * f1.n(), 2 * f1.n());
  joined << f1.orthonormal(), f2.orthonormal();
  return singular_values(joined).minCoeff();
}

Splitting::Splitting(Mat basis) : basis_(std::move(basis)), inverse_(symplectic_inverse(basis_)) {}

Splitting Splitting::standard(int n) { return Splitting(Mat::Identity(2 * n, 2 * n)); }

Splitting::Splitting(const LagrangianFrame& base, const LagrangianFrame& vertical) {
  require_same_space(base, vertical);
  const int n = base.n();
  const Mat J = symplectic_J(n);
  const Mat b = base.orthonormal();
  const Mat v = vertical.orthonormal();
  const Mat pairing = b.transpose() * J * v;
  if (numerical_rank(pairing) < n)
    throw Error(ErrorKind::NotInChart, "base and vertical planes are not transversal");
  basis_.resize(2 * n, 2 * n);
  basis_ << b, v * pairing.inverse();
  inverse_ = symplectic_inverse(basis_);
}

SymmetricChart::SymmetricChart(const Mat& s) {
  if (s.rows() != s.cols() || s.rows() < 1) throw Error(ErrorKind::Shape, "chart must be square");
  S_ = symmetrize(s);
}

LagrangianFrame frame_from_chart(const SymmetricChart& chart) {
  const int n = chart.n();
  Mat c(2 * n, n);
  c << Mat::Identity(n, n), chart.S();
  return LagrangianFrame::unchecked(std::move(c));
}

LagrangianFrame frame_from_chart(const SymmetricChart& chart, const Splitting& splitting) {
  if (splitting.n() != chart.n()) throw Error(ErrorKind::Shape, "chart and splitting differ in n");
  return frame_from_chart(chart).transformed(splitting.basis());
}

SymmetricChart chart_from_frame(const LagrangianFrame& frame, double tol) {
  return chart_from_frame(frame, Splitting::standard(frame.n()), tol);
}

SymmetricChart chart_from_frame(const LagrangianFrame& frame, const Splitting& splitting,
                                double tol) {
  if (splitting.n() != frame.n()) throw Error(ErrorKind::Shape, "frame and splitting differ in n");
  const int n = frame.n();
  const Mat q = orthonormal_basis(splitting.coordinates(frame.columns()));
  if (q.cols() != n) throw Error(ErrorKind::Invariant, "frame is rank deficient");
  const Mat x = q.topRows(n);
  const Vec s = singular_values(x);
  if (s(n - 1) <= tol * std::max(1.0, s(0)))
    throw Error(ErrorKind::NotInChart, "plane meets the vertical of the splitting");
  const Mat y = q.bottomRows(n);
  return SymmetricChart(x.transpose().partialPivLu().solve(y.transpose()).transpose());
}

TangentForm tangent_form(const FramePath& curve, double t0, double h) {
  return tangent_form(curve, t0, Splitting::standard(curve(t0).n()), h);
}

TangentForm tangent_form(const FramePath& curve, double t0, const Splitting& splitting, double h) {
  LagrangianFrame base = curve(t0);
  const int n = base.n();
  const Mat sp = chart_from_frame(curve(t0 + h), splitting).S();
  const Mat sm = chart_from_frame(curve(t0 - h), splitting).S();
  const Mat sdot = (sp - sm) / (2.0 * h);
  const Mat coords = splitting.coordinates(base.columns());
  if (base_margin(coords) <= kRankTol)
    throw Error(ErrorKind::NotInChart, "base plane meets the vertical of the splitting");
  const Mat x = coords.topRows(n);
  return TangentForm{std::move(base), symmetrize(x.transpose() * sdot * x)};
}

Mat change_chart(const Mat& S, const Mat& A, const Mat& B) {
  const auto n = S.rows();
  if (S.cols() != n || A.rows() != n || A.cols() != n || B.rows() != n || B.cols() != n)
    throw Error(ErrorKind::Shape, "change_chart expects n x n inputs");
  const Mat r = A.transpose() * symmetrize(S) * A;
  const Mat m = Mat::Identity(n, n) + symmetrize(B) * r;
  if (numerical_rank(m, 1e-12) < n)
    throw Error(ErrorKind::ChartBoundary, "I + B A^T S A is singular");
  // R M^{-1} = (M^{-T} R^T)^T
  return symmetrize(m.transpose().partialPivLu().solve(r.transpose()).transpose());
}

Mat chart_change_transform(const Mat& A, const Mat& B) {
  const auto n = A.rows();
  Mat t = Mat::Zero(2 * n, 2 * n);
  t.topLeftCorner(n, n) = A.inverse();
  t.topRightCorner(n, n) = symmetrize(B) * A.transpose();
  t.bottomRightCorner(n, n) = A.transpose();
  return t;
}

LocalSubmersion::LocalSubmersion(const LagrangianFrame& lam0, const LagrangianFrame& delta,
                                 const LagrangianFrame& complement, double tol)
    : splitting_(delta, complement), tol_(tol) {
  s0_ = chart_from_frame(lam0, splitting_, tol).S();
  const double scale = std::max(1.0, singular_values(s0_)(0));
  Eigen::SelfAdjointEigenSolver<Mat> eig(s0_);
  std::vector<int> ker, rng;
  for (int i = 0; i < s0_.rows(); ++i)
    (std::abs(eig.eigenvalues()(i)) <= tol * scale ? ker : rng).push_back(i);
  if (ker.empty())
    throw Error(ErrorKind::Invariant, "base plane is transversal to delta (k = 0)");
  kernel_.resize(s0_.rows(), static_cast<Eigen::Index>(ker.size()));
  complement_basis_.resize(s0_.rows(), static_cast<Eigen::Index>(rng.size()));
  for (std::size_t j = 0; j < ker.size(); ++j) kernel_.col(j) = eig.eigenvectors().col(ker[j]);
  for (std::size_t j = 0; j < rng.size(); ++j)
    complement_basis_.col(j) = eig.eigenvectors().col(rng[j]);
}

Mat LocalSubmersion::chart(const LagrangianFrame& plane) const {
  return chart_from_frame(plane, splitting_, tol_).S();
}

Mat LocalSubmersion::operator()(const LagrangianFrame& plane) const {
  return from_chart(chart(plane));
}

Mat LocalSubmersion::from_chart(const Mat& s) const {
  const Mat& K = kernel_;
  const Mat& C = complement_basis_;
  const Mat s22 = K.transpose() * s * K;
  if (C.cols() == 0) return symmetrize(s22);
  const Mat s11 = C.transpose() * s * C;
  const Mat s12 = C.transpose() * s * K;
  auto lu = s11.partialPivLu();
  if (numerical_rank(s11, 1e-12) < s11.rows())
    throw Error(ErrorKind::ChartBoundary, "plane too far from the base point");
  return symmetrize(s22 - s12.transpose() * lu.solve(s12));
}

int LocalSubmersion::kernel_dimension(const LagrangianFrame& plane) const {
  const Vec s = singular_values((*this)(plane));
  const double floor = tol_ * std::max(1.0, singular_values(s0_)(0));
  return static_cast<int>((s.array() <= floor).count());
}

int stratum_index(const LagrangianFrame& frame, const LagrangianFrame& delta, double tol) {
  return intersection_dimension(frame, delta, tol);
}

}  // namespace maslovkit
