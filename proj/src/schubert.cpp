#include "maslovkit/schubert.hpp"

#include <algorithm>
#include <numeric>

#include "maslovkit/errors.hpp"

namespace maslovkit {

std::vector<int> transpose_partition(const std::vector<int>& parts) {
  const int n = static_cast<int>(parts.size());
  std::vector<int> t(n, 0);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      if (parts[r] > c) ++t[c];
  return t;
}

SymmetricPartition::SymmetricPartition(std::vector<int> parts) : parts_(std::move(parts)) {
  const int n = static_cast<int>(parts_.size());
  if (n < 1) throw Error(ErrorKind::Shape, "partition needs n >= 1 parts");
  for (int i = 0; i < n; ++i) {
    if (parts_[i] < 0 || parts_[i] > n) throw Error(ErrorKind::Invariant, "part outside the n x n box");
    if (i > 0 && parts_[i] > parts_[i - 1]) throw Error(ErrorKind::Invariant, "parts must be non-increasing");
  }
  if (transpose_partition(parts_) != parts_) throw Error(ErrorKind::Invariant, "partition is not self-transpose");
}

int SymmetricPartition::size() const noexcept { return std::accumulate(parts_.begin(), parts_.end(), 0); }

int SymmetricPartition::diagonal() const noexcept {
  int l = 0;
  for (int i = 0; i < n(); ++i)
    if (parts_[i] >= i + 1) l = i + 1;
  return l;
}

SymmetricPartition SymmetricPartition::complement() const {
  std::vector<int> b(n());
  for (int i = 0; i < n(); ++i) b[i] = n() - parts_[n() - 1 - i];
  return SymmetricPartition(std::move(b));
}

bool SymmetricPartition::contained_in(const SymmetricPartition& b) const {
  if (b.n() != n()) return false;
  for (int i = 0; i < n(); ++i)
    if (parts_[i] > b.parts_[i]) return false;
  return true;
}

std::string SymmetricPartition::to_string() const {
  std::string s = "(";
  for (int i = 0; i < n(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
  return s + ")";
}

std::vector<SymmetricPartition> enumerate_symmetric_partitions(int n) {
  if (n < 1 || n > 20) throw Error(ErrorKind::Shape, "enumeration needs 1 <= n <= 20");
  // A symmetric diagram is a set of nested diagonal hooks with distinct arms in {0..n-1}.
  std::vector<SymmetricPartition> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    std::vector<int> arms;
    for (int h = n - 1; h >= 0; --h)
      if (mask & (std::uint32_t{1} << h)) arms.push_back(h);
    std::vector<int> parts(n, 0);
    for (int d = 0; d < static_cast<int>(arms.size()); ++d) {
      parts[d] += arms[d] + 1;
      for (int r = d + 1; r <= d + arms[d]; ++r) ++parts[r];
    }
    out.emplace_back(std::move(parts));
  }
  std::sort(out.begin(), out.end(), [](const SymmetricPartition& a, const SymmetricPartition& b) {
    if (a.codim() != b.codim()) return a.codim() < b.codim();
    return a.parts() < b.parts();
  });
  return out;
}

std::vector<std::uint64_t> poincare_polynomial(int n) {
  std::vector<std::uint64_t> c(n * (n + 1) / 2 + 1, 0);
  for (const auto& a : enumerate_symmetric_partitions(n)) ++c[a.codim()];
  return c;
}

IsotropicFlag::IsotropicFlag(Mat basis, double tol) : basis_(std::move(basis)) {
  const Eigen::Index d = basis_.rows();
  if (d % 2 != 0 || basis_.cols() != d || d == 0) throw Error(ErrorKind::Shape, "flag basis must be 2n x 2n");
  if (numerical_rank(basis_) != d) throw Error(ErrorKind::Invariant, "flag basis is singular");
  const int n = static_cast<int>(d / 2);
  const Mat J = symplectic_J(n);
  const Mat gram = basis_.transpose() * J * basis_;
  const double scale = std::max(1.0, basis_.squaredNorm());
  for (int j = 1; j <= n; ++j)
    if (gram.topLeftCorner(j, 2 * n - j).cwiseAbs().maxCoeff() > tol * scale)
      throw Error(ErrorKind::Invariant, "flag is not isotropic at j = " + std::to_string(j));
}

IsotropicFlag IsotropicFlag::standard(int n) {
  Mat b = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    b(n + i, i) = 1.0;
    b(n - 1 - i, n + i) = 1.0;
  }
  return IsotropicFlag(std::move(b));
}

bool schubert_membership(const LagrangianFrame& plane, const IsotropicFlag& flag, const SymmetricPartition& a,
                         double tol) {
  const int n = flag.n();
  if (plane.n() != n || a.n() != n) throw Error(ErrorKind::Shape, "dimension mismatch");
  const Mat l = plane.orthonormal();
  for (int i = 1; i <= n; ++i) {
    const Mat v = orthonormal_basis(flag.subspace(n + i - a.parts()[i - 1]));
    if (subspace_intersection_dimension(l, v, tol) < i) return false;
  }
  return true;
}

LagrangianFrame random_schubert_member(const IsotropicFlag& flag, const SymmetricPartition& a, std::mt19937_64& rng) {
  const int n = flag.n();
  if (a.n() != n) throw Error(ErrorKind::Shape, "dimension mismatch");
  const Mat J = symplectic_J(n);
  std::normal_distribution<double> gauss;
  Mat w(2 * n, 0);
  for (int i = 1; i <= n; ++i) {
    const Mat v = orthonormal_basis(flag.subspace(n + i - a.parts()[i - 1]));
    const Mat c = w.cols() == 0 ? v : Mat(v * null_space(w.transpose() * J * v));
    if (c.cols() <= w.cols()) throw Error(ErrorKind::Invariant, "no room for a new isotropic vector");
    Vec coef(c.cols());
    for (auto& x : coef) x = gauss(rng);
    Vec next = c * coef;
    if (w.cols() > 0) next -= w * (w.transpose() * next);
    next.normalize();
    w.conservativeResize(Eigen::NoChange, w.cols() + 1);
    w.col(w.cols() - 1) = next;
  }
  return LagrangianFrame(w);
}

}  // namespace maslovkit
