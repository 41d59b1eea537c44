#pragma once

// Cell structure of L(n): symmetric Young diagrams in the n x n box, their
// codimensions, Betti numbers mod 2, and Schubert membership for an
// isotropic flag.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "maslovkit/core.hpp"

namespace maslovkit {

class SymmetricPartition {
 public:
  /// Parts a_1 >= ... >= a_n >= 0 with a_1 <= n; throws Invariant unless self-transpose.
  explicit SymmetricPartition(std::vector<int> parts);

  int n() const noexcept { return static_cast<int>(parts_.size()); }
  const std::vector<int>& parts() const noexcept { return parts_; }
  int size() const noexcept;
  /// l(a) = max{i : a_i >= i}.
  int diagonal() const noexcept;
  int codim() const noexcept { return (size() + diagonal()) / 2; }
  /// b_i = n - a_{n+1-i}.
  SymmetricPartition complement() const;
  /// a_i <= b_i for every i.
  bool contained_in(const SymmetricPartition& b) const;
  std::string to_string() const;

  bool operator==(const SymmetricPartition& o) const noexcept { return parts_ == o.parts_; }

 private:
  std::vector<int> parts_;
};

/// Transpose of a partition of length n with parts at most n.
std::vector<int> transpose_partition(const std::vector<int>& parts);

/// All 2^n symmetric partitions in the n x n box, ordered by codimension then parts.
std::vector<SymmetricPartition> enumerate_symmetric_partitions(int n);

/// Coefficient c is the number of cells of codimension c.
std::vector<std::uint64_t> poincare_polynomial(int n);

/// Nested V_1 < ... < V_2n, V_j spanned by the first j columns of a basis.
class IsotropicFlag {
 public:
  /// Throws Invariant unless the basis is invertible and sigma(V_j, V_{2n-j}) = 0.
  explicit IsotropicFlag(Mat basis, double tol = 1e-9);
  /// p_1, ..., p_n, x_n, ..., x_1; V_n is the vertical.
  static IsotropicFlag standard(int n);

  int n() const noexcept { return static_cast<int>(basis_.cols() / 2); }
  const Mat& basis() const noexcept { return basis_; }
  Mat subspace(int j) const { return basis_.leftCols(j); }

 private:
  Mat basis_;
};

/// dim(L cap V_{n+i-a_i}) >= i for i = 1..n.
bool schubert_membership(const LagrangianFrame& plane, const IsotropicFlag& flag, const SymmetricPartition& a,
                         double tol = kRankTol);

/// Random plane spanned by w_i in V_{n+i-a_i}, each chosen skew-orthogonal to the previous ones.
LagrangianFrame random_schubert_member(const IsotropicFlag& flag, const SymmetricPartition& a, std::mt19937_64& rng);

}  // namespace maslovkit
