#include "maslovkit/linalg.hpp"

namespace maslovkit {

Vec singular_values(const Mat& m) {
  if (m.size() == 0) return Vec();
  return Eigen::JacobiSVD<Mat>(m).singularValues();
}

int numerical_rank(const Mat& m, double rel_tol) {
  const Vec s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

Mat orthonormal_basis(const Mat& m, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  int r = 0;
  if (s.size() > 0 && s(0) > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

Mat null_space(const Mat& m, double rel_tol) {
  const auto cols = m.cols();
  if (m.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  int r = 0;
  if (s.size() > 0 && s(0) > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) ++r;
  return svd.matrixV().rightCols(cols - r);
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat symplectic_J(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return J;
}

double sigma(const Vec& v, const Vec& w) {
  const auto n = v.size() / 2;
  return v.head(n).dot(w.tail(n)) - v.tail(n).dot(w.head(n));
}

Mat symplectic_inverse(const Mat& m) {
  const Mat J = symplectic_J(static_cast<int>(m.rows() / 2));
  return -J * m.transpose() * J;
}

Mat cayley_symplectic(const Mat& sym_h) {
  const auto d = sym_h.rows();
  const Mat A = symplectic_J(static_cast<int>(d / 2)) * symmetrize(sym_h);
  const Mat I = Mat::Identity(d, d);
  return (I - 0.5 * A).partialPivLu().solve(I + 0.5 * A);
}

}  // namespace maslovkit
