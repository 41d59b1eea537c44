#pragma once

// Pencils of real quadrics: inertia stratification of the sphere of forms,
// the zero set of det as a union of ovals, Lebesgue sets and the duality
// bound, plus a sampling estimate of b0 of the base locus.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maslovkit/linalg.hpp"

namespace maslovkit {

struct Inertia {
  int pos = 0;
  int neg = 0;
  int ker = 0;
  bool operator==(const Inertia&) const = default;
};

/// Eigenvalue counts; |lambda| <= tol * ||Q|| counts as kernel.
Inertia inertia(const Mat& q, double tol = 1e-9);

class Pencil {
 public:
  /// k in {1, 2, 3} symmetric n x n forms spanning a space of dimension
  /// min(k, n(n+1)/2); for n >= 2 this is linear independence.
  explicit Pencil(std::vector<Mat> forms);

  int n() const noexcept { return static_cast<int>(forms_.front().rows()); }
  int k() const noexcept { return static_cast<int>(forms_.size()); }
  const std::vector<Mat>& forms() const noexcept { return forms_; }

  /// x_1 q_1 + ... + x_k q_k for x on the unit sphere.
  Mat evaluate(const Vec& x) const;

 private:
  std::vector<Mat> forms_;
};

/// The pencil diag(1, -1), offdiag(1), I with det = z^2 - x^2 - y^2.
Pencil example_pencil();

class SphereMesh {
 public:
  /// Subdivided icosahedron on S^2 with vertices at both poles.
  static SphereMesh icosphere(int level);
  /// Regular polygon on S^1.
  static SphereMesh polygon(int vertices);
  /// The two points of S^0.
  static SphereMesh points();
  /// icosphere(level), polygon(polygon_vertices) or points() for k = 3, 2, 1.
  static SphereMesh for_dimension(int k, int level = 6, int polygon_vertices = 4096);

  int dimension() const noexcept { return dim_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  const std::vector<Vec>& vertices() const noexcept { return vertices_; }
  const std::vector<std::array<int, 2>>& edges() const noexcept { return edges_; }
  /// Each triangle lists its three edge indices, in vertex order (01, 12, 20).
  const std::vector<std::array<int, 3>>& triangles() const noexcept { return triangles_; }
  const std::vector<std::array<int, 3>>& triangle_edges() const noexcept { return triangle_edges_; }
  /// Index of the antipodal vertex.
  int antipode(int v) const { return antipode_[v]; }
  int level() const noexcept { return level_; }

 private:
  void finish();

  int dim_ = 0;
  int level_ = 0;
  std::vector<Vec> vertices_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<int> antipode_;
};

struct ZeroPoint {
  int edge = -1;
  Vec x;
  int oval = -1;
};

struct Oval {
  int id = 0;
  int sign = 0;
  double length = 0.0;
  int vertex_count = 0;
  bool self_antipodal = false;
};

struct StratifiedSphere {
  int n = 0;
  int k = 0;
  double tol = 0.0;
  SphereMesh mesh;
  std::vector<Inertia> inertia;
  /// Sign of det at each vertex and the raw count of positive eigenvalues,
  /// both read from the eigenvalues without the kernel threshold.
  std::vector<int> det_sign;
  std::vector<int> raw_pos;
  std::vector<ZeroPoint> points;
  std::vector<std::array<int, 2>> segments;
  std::vector<Oval> ovals;
  /// Smallest |det| / ||Q||^n over the mesh vertices.
  double min_vertex_det = 0.0;
};

/// Vertex inertia, the zero set of det and its ovals with coorientations.
StratifiedSphere stratify(const Pencil& pencil, const SphereMesh& mesh, double tol = 1e-9);

struct LebesgueSet {
  int j = 0;
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int b0 = 0;
  int euler = 0;
};

/// Induced subcomplex on the vertices with i+ >= j.
LebesgueSet lebesgue_set(const StratifiedSphere& s, int j);

/// n + (1/2) b(Sigma_W); for k = 3 each oval contributes 2, for k = 2 each
/// zero contributes 1.
double duality_bound(const StratifiedSphere& s);

struct BaseLocusOptions {
  int samples = 2000;
  double eps = 0.0;          // 0 selects 1e-3 * mean form norm
  // 0 grows the radius from max(5 * median spacing, 0.02) until the cluster
  // count is unchanged at twice the radius.
  double link_radius = 0.0;
  int newton_steps = 60;
  std::uint64_t seed = 1;
};

struct BaseLocusEstimate {
  int b0 = 0;
  int accepted = 0;
  int attempted = 0;
  double acceptance_rate = 0.0;
  double eps = 0.0;
  double link_radius = 0.0;
  bool inconclusive = false;
  bool unstable = false;
};

/// Projects random unit vectors onto {q_i = 0} by Gauss-Newton on the sphere,
/// keeps those with max |q_i| < eps, and counts clusters of the accepted
/// points under the projective distance.
BaseLocusEstimate sample_base_locus_b0(const Pencil& pencil, const BaseLocusOptions& options = {});

/// Cluster count of points in RP^{n-1} linked at distance r.
int projective_clusters(const std::vector<Vec>& points, double r);

}  // namespace maslovkit
