#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "maslovkit/errors.hpp"
#include "maslovkit/pencils.hpp"
#include "test_helpers.hpp"

using namespace maslovkit;
using testing::random_invertible;
using testing::random_symmetric;

namespace {

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

Pencil random_pencil(int n, int k, std::mt19937_64& rng) {
  std::vector<Mat> forms;
  for (int i = 0; i < k; ++i) forms.push_back(random_symmetric(n, rng));
  return Pencil(forms);
}

// Eigenvalues z +- sqrt(x^2 + y^2) of the example pencil.
Inertia example_inertia(const Vec& x) {
  const double r = std::hypot(x(0), x(1));
  Inertia in;
  for (double l : {x(2) + r, x(2) - r}) (l > 0 ? in.pos : in.neg)++;
  return in;
}

}  // namespace

TEST_CASE("inertia examples") {
  CHECK(inertia(diag({1, -1})) == Inertia{1, 1, 0});
  CHECK(inertia(Mat::Zero(3, 3)) == Inertia{0, 0, 3});
  CHECK(inertia(diag({2, 3, 5})) == Inertia{3, 0, 0});
  CHECK(inertia(diag({1, 1e-14, -2})) == Inertia{1, 1, 1});
}

TEST_CASE("Sylvester stability") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 6;
    const Mat q = random_symmetric(n, rng);
    const Mat g = random_invertible(n, rng);
    CHECK(inertia(g.transpose() * q * g) == inertia(q));
  }
}

TEST_CASE("pencil construction and evaluation") {
  const Pencil p = example_pencil();
  CHECK(p.n() == 2);
  CHECK(p.k() == 3);
  CHECK((p.evaluate(Vec::Unit(3, 0)) - p.forms()[0]).norm() == 0.0);
  CHECK(inertia(p.evaluate(-Vec::Unit(3, 0))) == Inertia{1, 1, 0});
  CHECK(p.evaluate(Vec::Unit(3, 2)).isIdentity());
  CHECK(inertia(p.evaluate(Vec::Unit(3, 2))).pos == 2);
  CHECK_THROWS_AS(p.evaluate(Vec::Ones(2)), Error);
  CHECK_THROWS_AS(Pencil({diag({1, 2}), diag({2, 4})}), Error);
  Mat ns(2, 2);
  ns << 0, 1, 0, 0;
  CHECK_THROWS_AS(Pencil({ns}), Error);
  CHECK_THROWS_AS(Pencil({diag({1, 2}), Mat::Identity(3, 3)}), Error);
}

TEST_CASE("sphere meshes") {
  for (int level = 0; level <= 4; ++level) {
    const auto m = SphereMesh::icosphere(level);
    const long nv = static_cast<long>(m.vertex_count());
    const long ne = static_cast<long>(m.edges().size());
    const long nf = static_cast<long>(m.triangles().size());
    CHECK(nv - ne + nf == 2);
    CHECK(nf == 20L << (2 * level));
    CHECK(2 * ne == 3 * nf);
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
      CHECK(std::abs(m.vertices()[v].norm() - 1.0) < 1e-14);
      CHECK((m.vertices()[m.antipode(static_cast<int>(v))] + m.vertices()[v]).norm() < 1e-12);
    }
  }
  CHECK(SphereMesh::icosphere(6).vertex_count() == 40962);
  const auto poly = SphereMesh::polygon(16);
  CHECK(poly.edges().size() == 16);
  CHECK(poly.antipode(3) == 11);
  CHECK(SphereMesh::points().antipode(0) == 1);
}

TEST_CASE("example pencil stratification") {
  const auto start = std::chrono::steady_clock::now();
  const Pencil p = example_pencil();
  const auto s = stratify(p, SphereMesh::icosphere(6));
  REQUIRE(s.ovals.size() == 2);
  CHECK(s.ovals[0].sign == -s.ovals[1].sign);
  for (std::size_t v = 0; v < s.mesh.vertex_count(); ++v) {
    CHECK(s.inertia[v] == example_inertia(s.mesh.vertices()[v]));
    const Inertia a = s.inertia[s.mesh.antipode(static_cast<int>(v))];
    CHECK((a.pos == s.inertia[v].neg && a.neg == s.inertia[v].pos));
  }
  // Zero points lie on z = +-1/sqrt(2); the upper circle has sign +1.
  for (const auto& pt : s.points) {
    CHECK(std::abs(std::abs(pt.x(2)) - std::sqrt(0.5)) < 1e-10);
    const int expected = pt.x(2) > 0 ? 1 : -1;
    CHECK(s.ovals[pt.oval].sign == expected);
  }
  for (const auto& o : s.ovals) {
    CHECK(o.length == doctest::Approx(2 * M_PI * std::sqrt(0.5)).epsilon(1e-3));
    CHECK_FALSE(o.self_antipodal);
  }
  CHECK(duality_bound(s) == 4.0);
  const auto w2 = lebesgue_set(s, 2);
  CHECK(w2.b0 == 1);
  CHECK(w2.euler == 1);
  const auto w0 = lebesgue_set(s, 0);
  CHECK(w0.b0 == 1);
  CHECK(w0.euler == 2);
  CHECK(lebesgue_set(s, 1).euler == 1);
  CHECK(lebesgue_set(s, 3).b0 == 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 10.0);
}

TEST_CASE("n = 1 pencils give one great circle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Pencil p = random_pencil(1, 3, rng);
    const auto s = stratify(p, SphereMesh::icosphere(4));
    REQUIRE(s.ovals.size() == 1);
    CHECK(s.ovals[0].self_antipodal);
    CHECK(s.ovals[0].length == doctest::Approx(2 * M_PI).epsilon(1e-2));
    CHECK(duality_bound(s) == 2.0);
    // The side of the north pole is the inside.
    const double c = p.forms()[2](0, 0);
    CHECK(s.ovals[0].sign == (c > 0 ? 1 : -1));
  }
}

TEST_CASE("k = 1 and k = 2 pencils") {
  const Pencil one({diag({1, 2, 3})});
  const auto s1 = stratify(one, SphereMesh::points());
  CHECK(duality_bound(s1) == 3.0);
  CHECK(s1.points.empty());
  CHECK_THROWS_AS(stratify(Pencil({diag({1, 0, 0})}), SphereMesh::points()), Error);

  // det(cos t diag(1, -1) + sin t I) = sin^2 t - cos^2 t vanishes at t = pi/4 + j pi/2.
  const Pencil two({diag({1, -1}), Mat::Identity(2, 2)});
  const auto s2 = stratify(two, SphereMesh::polygon(256));
  REQUIRE(s2.points.size() == 4);
  for (const auto& pt : s2.points) CHECK(std::abs(std::abs(pt.x(0)) - std::sqrt(0.5)) < 1e-10);
  CHECK(duality_bound(s2) == 4.0);
  int total = 0;
  for (const auto& o : s2.ovals) total += o.sign;
  CHECK(total == 0);
}

TEST_CASE("non-generic pencils are refused") {
  // det = xyz; at the poles of the mesh two eigenvalues vanish together.
  const Pencil coordinate({diag({1, 0, 0}), diag({0, 1, 0}), diag({0, 0, 1})});
  try {
    stratify(coordinate, SphereMesh::icosphere(3));
    FAIL("expected non-generic pencil");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonGeneric);
  }
}

TEST_CASE("degree sanity on great circles") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 5;
    const Pencil p = random_pencil(n, 3, rng);
    Vec a(3), b(3);
    for (int i = 0; i < 3; ++i) a(i) = g(rng), b(i) = g(rng);
    a.normalize();
    b = (b - b.dot(a) * a).normalized();
    int changes = 0;
    double prev = p.evaluate(a).determinant();
    const int steps = 20000;
    for (int i = 1; i <= steps; ++i) {
      const double t = M_PI * i / steps;
      const double d = p.evaluate(std::cos(t) * a + std::sin(t) * b).determinant();
      if ((d > 0) != (prev > 0)) ++changes;
      prev = d;
    }
    CHECK(changes <= n);
    CHECK(changes % 2 == n % 2);
  }
}

TEST_CASE("random pencils: antipodal signs and refinement stability") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 4;
    const Pencil p = random_pencil(n, 3, rng);
    const auto s4 = stratify(p, SphereMesh::icosphere(5));
    const auto s5 = stratify(p, SphereMesh::icosphere(6));
    CHECK(s4.ovals.size() == s5.ovals.size());
    for (std::size_t v = 0; v < s4.mesh.vertex_count(); ++v) {
      const Inertia a = s4.inertia[s4.mesh.antipode(static_cast<int>(v))];
      CHECK((a.pos == s4.inertia[v].neg && a.neg == s4.inertia[v].pos));
    }
    int sum4 = 0, sum5 = 0;
    for (const auto& o : s4.ovals) sum4 += o.sign;
    for (const auto& o : s5.ovals) sum5 += o.sign;
    CHECK(sum4 == sum5);
    // Antipodal ovals carry opposite signs, so non-self-antipodal ovals cancel.
    int paired = 0;
    for (const auto& o : s5.ovals)
      if (!o.self_antipodal) paired += o.sign;
    CHECK(paired == 0);
    for (int j = 0; j <= n + 1; ++j) {
      const auto w = lebesgue_set(s5, j);
      CHECK(w.b0 >= 0);
      if (j == 0) CHECK(w.euler == 2);
      if (j > n) CHECK(w.vertices == 0);
    }
  }
}

TEST_CASE("base locus sampler examples") {
  const auto empty = sample_base_locus_b0(example_pencil());
  CHECK(empty.inconclusive);
  CHECK(empty.b0 == 0);

  const auto two = sample_base_locus_b0(Pencil({diag({1, -1})}));
  CHECK_FALSE(two.inconclusive);
  CHECK(two.b0 == 2);
  CHECK_FALSE(two.unstable);

  Mat xy(3, 3);
  xy << 0, 0.5, 0, 0.5, 0, 0, 0, 0, 0;
  const auto four = sample_base_locus_b0(Pencil({diag({1, 1, -1}), xy}));
  CHECK(four.b0 == 4);
  CHECK_FALSE(four.unstable);

  std::vector<Vec> pts = {Vec::Unit(2, 0), -Vec::Unit(2, 0), Vec::Unit(2, 1)};
  CHECK(projective_clusters(pts, 0.1) == 2);
}

TEST_CASE("sampled b0 respects the duality bound") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 3;
    const Pencil p = random_pencil(n, 3, rng);
    const auto s = stratify(p, SphereMesh::icosphere(5));
    BaseLocusOptions opt;
    opt.samples = 1000;
    opt.seed = 100 + trial;
    const auto est = sample_base_locus_b0(p, opt);
    CHECK(est.b0 <= duality_bound(s));
  }
}
