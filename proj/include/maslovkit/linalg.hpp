#pragma once

#include <Eigen/Dense>
#include <complex>

namespace maslovkit {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

/// Default relative threshold for numerical rank decisions.
inline constexpr double kRankTol = 1e-8;

/// Singular values in decreasing order.
Vec singular_values(const Mat& m);

/// Number of singular values above rel_tol times the largest one.
int numerical_rank(const Mat& m, double rel_tol = kRankTol);

/// Orthonormal basis of the column space (thin QR on full-rank input,
/// SVD otherwise so rank-deficient columns are dropped).
Mat orthonormal_basis(const Mat& m, double rel_tol = kRankTol);

/// Orthonormal basis of the right null space, using the same threshold.
Mat null_space(const Mat& m, double rel_tol = kRankTol);

Mat symmetrize(const Mat& m);

/// Standard symplectic matrix [[0, I], [-I, 0]] on R^{2n}.
Mat symplectic_J(int n);

/// sigma(v, w) = x_v . p_w - p_v . x_w
double sigma(const Vec& v, const Vec& w);

/// Symplectic inverse -J M^T J (valid only for symplectic M).
Mat symplectic_inverse(const Mat& m);

/// Cayley transform of the Hamiltonian matrix J*H, which is symplectic for symmetric H.
Mat cayley_symplectic(const Mat& sym_h);

}  // namespace maslovkit
