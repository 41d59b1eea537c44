#include "maslovkit/pencils.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <tuple>
#include <unordered_map>

#include "maslovkit/errors.hpp"
#include "maslovkit/parallel.hpp"

namespace maslovkit {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Relative size of the second smallest eigenvalue below which a zero of det
// is treated as a point of the deeper stratum.
constexpr double kSingularGap = 1e-6;

// Largest automatic link radius for the base-locus clustering.
constexpr double kMaxLinkRadius = 0.5;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

Vec eigenvalues(const Mat& q) {
  return Eigen::SelfAdjointEigenSolver<Mat>(q, Eigen::EigenvaluesOnly).eigenvalues();
}

int negative_parity(const Vec& ev) {
  int neg = 0;
  for (double l : ev)
    if (l < 0) ++neg;
  return neg % 2 == 0 ? 1 : -1;
}

double projective_distance(const Vec& a, const Vec& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

}  // namespace

Inertia inertia(const Mat& q, double tol) {
  if (q.rows() != q.cols()) throw Error(ErrorKind::Shape, "quadratic form must be square");
  Inertia out;
  if (q.rows() == 0) return out;
  const Vec ev = eigenvalues(symmetrize(q));
  const double scale = ev.cwiseAbs().maxCoeff();
  for (double l : ev) {
    if (std::abs(l) <= tol * scale || scale == 0.0)
      ++out.ker;
    else if (l > 0)
      ++out.pos;
    else
      ++out.neg;
  }
  return out;
}

Pencil::Pencil(std::vector<Mat> forms) : forms_(std::move(forms)) {
  if (forms_.empty() || forms_.size() > 3)
    throw Error(ErrorKind::Shape, "a pencil has between 1 and 3 forms");
  const auto n = forms_.front().rows();
  if (n == 0) throw Error(ErrorKind::Shape, "forms must be nonempty");
  Mat stacked(n * n, forms_.size());
  for (std::size_t i = 0; i < forms_.size(); ++i) {
    Mat& q = forms_[i];
    if (q.rows() != n || q.cols() != n) throw Error(ErrorKind::Shape, "forms must share size n x n");
    if ((q - q.transpose()).norm() > 1e-12 * std::max(1.0, q.norm()))
      throw Error(ErrorKind::Invariant, "form is not symmetric");
    q = symmetrize(q);
    stacked.col(static_cast<Eigen::Index>(i)) = q.reshaped();
  }
  const auto sym_dim = static_cast<int>(n * (n + 1) / 2);
  if (numerical_rank(stacked) < std::min(static_cast<int>(forms_.size()), sym_dim))
    throw Error(ErrorKind::Invariant, "forms are linearly dependent");
}

Mat Pencil::evaluate(const Vec& x) const {
  if (x.size() != k()) throw Error(ErrorKind::Shape, "point has the wrong dimension");
  Mat q = Mat::Zero(n(), n());
  for (int i = 0; i < k(); ++i) q += x(i) * forms_[i];
  return q;
}

Pencil example_pencil() {
  Mat q1(2, 2), q2(2, 2);
  q1 << 1, 0, 0, -1;
  q2 << 0, 1, 1, 0;
  return Pencil({q1, q2, Mat::Identity(2, 2)});
}

SphereMesh SphereMesh::icosphere(int level) {
  if (level < 0 || level > 9) throw Error(ErrorKind::Shape, "icosphere level must be in [0, 9]");
  SphereMesh m;
  m.dim_ = 3;
  m.level_ = level;
  auto push = [&m](double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    m.vertices_.push_back(v.normalized());
  };
  const double z = 1.0 / std::sqrt(5.0), r = 2.0 / std::sqrt(5.0);
  push(0, 0, 1);
  push(0, 0, -1);
  for (int i = 0; i < 5; ++i) push(r * std::cos(2 * kPi * i / 5), r * std::sin(2 * kPi * i / 5), z);
  for (int i = 0; i < 5; ++i)
    push(r * std::cos(2 * kPi * i / 5 + kPi / 5), r * std::sin(2 * kPi * i / 5 + kPi / 5), -z);
  auto up = [](int i) { return 2 + (i % 5); };
  auto lo = [](int i) { return 7 + (i % 5); };
  for (int i = 0; i < 5; ++i) {
    m.triangles_.push_back({0, up(i), up(i + 1)});
    m.triangles_.push_back({up(i), lo(i), up(i + 1)});
    m.triangles_.push_back({up(i + 1), lo(i), lo(i + 1)});
    m.triangles_.push_back({1, lo(i + 1), lo(i)});
  }
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.vertices_.push_back((m.vertices_[a] + m.vertices_[b]).normalized());
      const int idx = static_cast<int>(m.vertices_.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.triangles_.size() * 4);
    for (const auto& t : m.triangles_) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    m.triangles_ = std::move(next);
  }
  m.finish();
  return m;
}

SphereMesh SphereMesh::polygon(int count) {
  if (count < 4 || count % 2 != 0)
    throw Error(ErrorKind::Shape, "polygon needs an even vertex count of at least 4");
  SphereMesh m;
  m.dim_ = 2;
  for (int i = 0; i < count; ++i) {
    Vec v(2);
    v << std::cos(2 * kPi * i / count), std::sin(2 * kPi * i / count);
    m.vertices_.push_back(v);
    m.edges_.push_back({i, (i + 1) % count});
  }
  m.finish();
  return m;
}

SphereMesh SphereMesh::points() {
  SphereMesh m;
  m.dim_ = 1;
  m.vertices_ = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  m.finish();
  return m;
}

SphereMesh SphereMesh::for_dimension(int k, int level, int polygon_vertices) {
  switch (k) {
    case 1:
      return points();
    case 2:
      return polygon(polygon_vertices);
    case 3:
      return icosphere(level);
    default:
      throw Error(ErrorKind::Shape, "sphere dimension must be 1, 2 or 3");
  }
}

void SphereMesh::finish() {
  if (dim_ == 3) {
    std::unordered_map<std::uint64_t, int> index;
    const std::uint64_t nv = vertices_.size();
    triangle_edges_.clear();
    for (const auto& t : triangles_) {
      std::array<int, 3> te{};
      for (int s = 0; s < 3; ++s) {
        const auto [a, b] = std::minmax(t[s], t[(s + 1) % 3]);
        const std::uint64_t key = static_cast<std::uint64_t>(a) * nv + static_cast<std::uint64_t>(b);
        auto [it, inserted] = index.emplace(key, static_cast<int>(edges_.size()));
        if (inserted) edges_.push_back({a, b});
        te[s] = it->second;
      }
      triangle_edges_.push_back(te);
    }
  }
  using Key = std::tuple<long long, long long, long long>;
  auto key = [](const Vec& v) {
    long long c[3] = {0, 0, 0};
    for (Eigen::Index i = 0; i < v.size(); ++i) c[i] = std::llround(v(i) * 1e8);
    return Key{c[0], c[1], c[2]};
  };
  std::map<Key, int> lookup;
  for (std::size_t i = 0; i < vertices_.size(); ++i) lookup.emplace(key(vertices_[i]), static_cast<int>(i));
  antipode_.assign(vertices_.size(), -1);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    auto it = lookup.find(key(-vertices_[i]));
    if (it == lookup.end()) throw Error(ErrorKind::Invariant, "mesh is not antipodally symmetric");
    antipode_[i] = it->second;
  }
}

StratifiedSphere stratify(const Pencil& pencil, const SphereMesh& mesh, double tol) {
  if (mesh.dimension() != pencil.k()) throw Error(ErrorKind::Shape, "mesh and pencil dimension differ");
  const int n = pencil.n();
  StratifiedSphere s;
  s.n = n;
  s.k = pencil.k();
  s.tol = tol;
  s.mesh = mesh;
  const std::size_t nv = mesh.vertex_count();
  s.inertia.resize(nv);
  s.det_sign.resize(nv);
  s.raw_pos.resize(nv);
  std::vector<double> rel_det(nv);

  parallel_for(nv, [&](std::size_t v) {
    const Vec ev = eigenvalues(pencil.evaluate(mesh.vertices()[v]));
    const double scale = ev.cwiseAbs().maxCoeff();
    Inertia in;
    int raw = 0;
    double d = 1.0;
    for (double l : ev) {
      if (l > 0) ++raw;
      d *= std::abs(l) / scale;
      if (std::abs(l) <= tol * scale)
        ++in.ker;
      else if (l > 0)
        ++in.pos;
      else
        ++in.neg;
    }
    if (in.ker >= 2)
      throw Error(ErrorKind::NonGeneric, "mesh vertex with kernel of dimension " + std::to_string(in.ker));
    s.inertia[v] = in;
    s.det_sign[v] = negative_parity(ev);
    s.raw_pos[v] = raw;
    rel_det[v] = d;
  });
  s.min_vertex_det = *std::min_element(rel_det.begin(), rel_det.end());

  // Zeros of det on edges, located by bisection of the sign along the arc.
  std::vector<int> crossing_edges;
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
    const auto [a, b] = mesh.edges()[e];
    if (s.det_sign[a] != s.det_sign[b]) crossing_edges.push_back(static_cast<int>(e));
  }
  std::vector<int> point_of_edge(mesh.edges().size(), -1);
  s.points.resize(crossing_edges.size());
  for (std::size_t i = 0; i < crossing_edges.size(); ++i) point_of_edge[crossing_edges[i]] = static_cast<int>(i);
  parallel_for(crossing_edges.size(), [&](std::size_t i) {
    const int e = crossing_edges[i];
    const auto [a, b] = mesh.edges()[e];
    Vec lo = mesh.vertices()[a], hi = mesh.vertices()[b];
    const int slo = s.det_sign[a];
    for (int it = 0; it < 60 && (hi - lo).norm() > 1e-14; ++it) {
      const Vec mid = (lo + hi).normalized();
      if (negative_parity(eigenvalues(pencil.evaluate(mid))) == slo)
        lo = mid;
      else
        hi = mid;
    }
    const Vec x = (lo + hi).normalized();
    if (n >= 2) {
      Vec ev = eigenvalues(pencil.evaluate(x)).cwiseAbs();
      std::sort(ev.begin(), ev.end());
      if (ev(1) <= kSingularGap * ev(n - 1))
        throw Error(ErrorKind::NonGeneric, "zero of det with kernel of dimension at least 2");
    }
    s.points[i].edge = e;
    s.points[i].x = x;
  });

  auto fail_sign = [] {
    throw Error(ErrorKind::NonGeneric, "inertia does not change by exactly one across the zero set");
  };

  if (s.k == 2) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto [a, b] = mesh.edges()[s.points[i].edge];
      const int delta = s.raw_pos[b] - s.raw_pos[a];
      if (std::abs(delta) != 1) fail_sign();
      s.points[i].oval = static_cast<int>(i);
      s.ovals.push_back(Oval{static_cast<int>(i), delta, 0.0, 1, false});
    }
    return s;
  }
  if (s.k != 3) return s;

  UnionFind uf(s.points.size());
  for (const auto& te : mesh.triangle_edges()) {
    int hit[3], count = 0;
    for (int e : te)
      if (point_of_edge[e] >= 0) hit[count++] = point_of_edge[e];
    if (count == 0) continue;
    if (count != 2) throw Error(ErrorKind::Invariant, "triangle with an odd number of sign changes");
    s.segments.push_back({hit[0], hit[1]});
    uf.unite(hit[0], hit[1]);
  }
  std::vector<int> root_to_oval(s.points.size(), -1);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const std::size_t r = uf.find(i);
    if (root_to_oval[r] < 0) {
      root_to_oval[r] = static_cast<int>(s.ovals.size());
      s.ovals.push_back(Oval{static_cast<int>(s.ovals.size())});
    }
    s.points[i].oval = root_to_oval[r];
    ++s.ovals[root_to_oval[r]].vertex_count;
  }
  for (const auto& seg : s.segments)
    s.ovals[s.points[seg[0]].oval].length += (s.points[seg[0]].x - s.points[seg[1]].x).norm();

  std::vector<std::vector<std::pair<int, int>>> adjacency(nv);
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
    const auto [a, b] = mesh.edges()[e];
    adjacency[a].push_back({b, static_cast<int>(e)});
    adjacency[b].push_back({a, static_cast<int>(e)});
  }
  std::vector<int> edge_oval(mesh.edges().size(), -1);
  for (const auto& p : s.points) edge_oval[p.edge] = p.oval;

  std::vector<int> label(nv);
  std::vector<int> stack;
  for (auto& oval : s.ovals) {
    std::fill(label.begin(), label.end(), -1);
    std::vector<int> sizes;
    for (std::size_t start = 0; start < nv; ++start) {
      if (label[start] >= 0) continue;
      const int comp = static_cast<int>(sizes.size());
      sizes.push_back(0);
      label[start] = comp;
      stack.assign(1, static_cast<int>(start));
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++sizes[comp];
        for (const auto& [w, e] : adjacency[v]) {
          if (edge_oval[e] == oval.id || label[w] >= 0) continue;
          label[w] = comp;
          stack.push_back(w);
        }
      }
    }
    if (sizes.size() != 2)
      throw Error(ErrorKind::Invariant, "oval does not separate the mesh into two sides");
    // The smaller side is the inside; for equal sides, the side of the north pole.
    const int inside = sizes[0] == sizes[1] ? label[0] : (sizes[0] < sizes[1] ? 0 : 1);
    int sign = 0;
    for (const auto& p : s.points) {
      if (p.oval != oval.id) continue;
      const auto [a, b] = mesh.edges()[p.edge];
      const int in = label[a] == inside ? a : b;
      const int out = in == a ? b : a;
      const int delta = s.raw_pos[in] - s.raw_pos[out];
      if (std::abs(delta) != 1 || (sign != 0 && delta != sign)) fail_sign();
      sign = delta;
    }
    oval.sign = sign;
  }

  // An oval is self-antipodal when the antipode of one of its edges lies on it.
  std::unordered_map<std::uint64_t, int> edge_index;
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
    const auto [a, b] = mesh.edges()[e];
    edge_index.emplace(static_cast<std::uint64_t>(a) * nv + b, static_cast<int>(e));
  }
  std::vector<bool> seen(s.ovals.size(), false);
  for (const auto& p : s.points) {
    if (seen[p.oval]) continue;
    seen[p.oval] = true;
    const auto [a, b] = mesh.edges()[p.edge];
    const int ca = mesh.antipode(a), cb = mesh.antipode(b);
    const auto [c, d] = std::minmax(ca, cb);
    auto it = edge_index.find(static_cast<std::uint64_t>(c) * nv + d);
    s.ovals[p.oval].self_antipodal = it != edge_index.end() && edge_oval[it->second] == p.oval;
  }
  return s;
}

LebesgueSet lebesgue_set(const StratifiedSphere& s, int j) {
  LebesgueSet out;
  out.j = j;
  const auto& mesh = s.mesh;
  std::vector<bool> in(mesh.vertex_count());
  for (std::size_t v = 0; v < in.size(); ++v) {
    in[v] = s.inertia[v].pos >= j;
    if (in[v]) ++out.vertices;
  }
  UnionFind uf(in.size());
  for (const auto& [a, b] : mesh.edges()) {
    if (in[a] && in[b]) {
      ++out.edges;
      uf.unite(a, b);
    }
  }
  for (const auto& t : mesh.triangles())
    if (in[t[0]] && in[t[1]] && in[t[2]]) ++out.faces;
  for (std::size_t v = 0; v < in.size(); ++v)
    if (in[v] && uf.find(v) == v) ++out.b0;
  out.euler = out.vertices - out.edges + out.faces;
  return out;
}

double duality_bound(const StratifiedSphere& s) {
  switch (s.k) {
    case 3:
      return s.n + static_cast<double>(s.ovals.size());
    case 2:
      return s.n + 0.5 * static_cast<double>(s.points.size());
    default:
      return s.n;
  }
}

int projective_clusters(const std::vector<Vec>& points, double r) {
  UnionFind uf(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (projective_distance(points[i], points[j]) <= r) uf.unite(i, j);
  int count = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (uf.find(i) == i) ++count;
  return count;
}

BaseLocusEstimate sample_base_locus_b0(const Pencil& pencil, const BaseLocusOptions& options) {
  const int n = pencil.n(), k = pencil.k();
  BaseLocusEstimate out;
  double mean_norm = 0.0;
  for (const auto& q : pencil.forms()) mean_norm += q.norm();
  mean_norm /= k;
  out.eps = options.eps > 0 ? options.eps : 1e-3 * mean_norm;
  out.attempted = options.samples;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> g;
  std::vector<Vec> starts(options.samples);
  for (auto& x : starts) {
    x.resize(n);
    for (int i = 0; i < n; ++i) x(i) = g(rng);
    x.normalize();
  }
  std::vector<char> accepted(options.samples, 0);
  parallel_for(starts.size(), [&](std::size_t s) {
    Vec x = starts[s];
    Vec r(k);
    Mat jac(k, n);
    for (int step = 0;; ++step) {
      for (int i = 0; i < k; ++i) {
        const Vec qx = pencil.forms()[i] * x;
        r(i) = x.dot(qx);
        jac.row(i) = 2.0 * qx.transpose();
      }
      if (r.cwiseAbs().maxCoeff() < 1e-3 * out.eps || step == options.newton_steps) break;
      const Mat tangent = jac * (Mat::Identity(n, n) - x * x.transpose());
      const Vec dx = tangent.completeOrthogonalDecomposition().solve(-r);
      x = (x + dx).normalized();
    }
    starts[s] = x;
    accepted[s] = r.cwiseAbs().maxCoeff() < out.eps;
  });
  std::vector<Vec> pts;
  for (std::size_t s = 0; s < starts.size(); ++s)
    if (accepted[s]) pts.push_back(starts[s]);
  out.accepted = static_cast<int>(pts.size());
  out.acceptance_rate = options.samples > 0 ? static_cast<double>(out.accepted) / options.samples : 0.0;
  if (out.acceptance_rate < 1e-6) {
    out.inconclusive = true;
    out.link_radius = options.link_radius;
    return out;
  }
  if (options.link_radius > 0) {
    out.link_radius = options.link_radius;
    out.b0 = projective_clusters(pts, out.link_radius);
    out.unstable = projective_clusters(pts, 0.5 * out.link_radius) != out.b0;
    return out;
  }
  std::vector<double> nearest(pts.size(), 2.0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) nearest[i] = std::min(nearest[i], projective_distance(pts[i], pts[j]));
  std::nth_element(nearest.begin(), nearest.begin() + nearest.size() / 2, nearest.end());
  const double median = pts.size() > 1 ? nearest[nearest.size() / 2] : 0.0;
  // Samples on positive-dimensional components are uneven, so the radius grows
  // from the spacing estimate until the cluster count holds over a factor of 2.
  double r = std::max(5.0 * median, 0.02);
  int count = projective_clusters(pts, r);
  out.unstable = true;
  while (r < kMaxLinkRadius) {
    const int wider = projective_clusters(pts, 2.0 * r);
    if (wider == count) {
      out.unstable = false;
      break;
    }
    r *= std::sqrt(2.0);
    count = projective_clusters(pts, r);
  }
  out.link_radius = r;
  out.b0 = count;
  return out;
}

}  // namespace maslovkit
