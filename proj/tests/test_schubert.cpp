#include <functional>
#include <random>

#include "doctest.h"
#include "maslovkit/errors.hpp"
#include "maslovkit/schubert.hpp"
#include "test_helpers.hpp"

using namespace maslovkit;

namespace {

// All non-increasing sequences in the n x n box that equal their transpose.
std::vector<std::vector<int>> brute_force_symmetric(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> parts(n);
  std::function<void(int, int)> rec = [&](int i, int cap) {
    if (i == n) {
      if (transpose_partition(parts) == parts) out.push_back(parts);
      return;
    }
    for (int v = 0; v <= cap; ++v) {
      parts[i] = v;
      rec(i + 1, v);
    }
  };
  rec(0, n);
  return out;
}

std::vector<std::uint64_t> product_expansion(int n) {
  std::vector<std::uint64_t> c{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next(c.size() + i, 0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j] += c[j];
      next[j + i] += c[j];
    }
    c = next;
  }
  return c;
}

LagrangianFrame random_graph(int n, std::mt19937_64& rng) {
  const Mat s = testing::random_symmetric(n, rng);
  Mat f(2 * n, n);
  f << Mat::Identity(n, n), s;
  return LagrangianFrame(f);
}

}  // namespace

TEST_CASE("symmetric partitions of small boxes") {
  const auto two = enumerate_symmetric_partitions(2);
  REQUIRE(two.size() == 4);
  const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {2, 1}, {2, 2}};
  for (int i = 0; i < 4; ++i) {
    CHECK(two[i].parts() == expected[i]);
    CHECK(two[i].codim() == i);
  }
  const auto one = enumerate_symmetric_partitions(1);
  CHECK(one.size() == 2);
  CHECK(poincare_polynomial(1) == std::vector<std::uint64_t>{1, 1});
  CHECK(poincare_polynomial(2) == std::vector<std::uint64_t>{1, 1, 1, 1});
  CHECK(SymmetricPartition({2, 2}).diagonal() == 2);
  CHECK(SymmetricPartition({1, 0, 0, 0}).codim() == 1);
  CHECK(SymmetricPartition({0, 0, 0}).codim() == 0);
  CHECK_THROWS_AS(SymmetricPartition({2, 0}), Error);
  CHECK_THROWS_AS(SymmetricPartition({1, 2}), Error);
  CHECK_THROWS_AS(SymmetricPartition({3, 1}), Error);
  CHECK_THROWS_AS(enumerate_symmetric_partitions(0), Error);
}

TEST_CASE("enumeration matches brute force and the product formula") {
  for (int n = 1; n <= 7; ++n) {
    auto brute = brute_force_symmetric(n);
    std::vector<std::vector<int>> listed;
    for (const auto& a : enumerate_symmetric_partitions(n)) listed.push_back(a.parts());
    std::sort(brute.begin(), brute.end());
    std::sort(listed.begin(), listed.end());
    CHECK(listed == brute);
  }
  for (int n = 1; n <= 12; ++n) {
    CHECK(enumerate_symmetric_partitions(n).size() == (std::size_t{1} << n));
    CHECK(poincare_polynomial(n) == product_expansion(n));
  }
}

TEST_CASE("codimension duality and the unique codimension-one cell") {
  for (int n = 1; n <= 9; ++n) {
    int codim_one = 0;
    for (const auto& a : enumerate_symmetric_partitions(n)) {
      CHECK((a.size() + a.diagonal()) % 2 == 0);
      CHECK(a.codim() + a.complement().codim() == n * (n + 1) / 2);
      CHECK(a.complement().complement() == a);
      if (a.codim() == 1) {
        ++codim_one;
        std::vector<int> train(n, 0);
        train[0] = 1;
        CHECK(a.parts() == train);
      }
    }
    CHECK(codim_one == 1);
  }
}

TEST_CASE("isotropic flags") {
  for (int n = 1; n <= 4; ++n) {
    const auto f = IsotropicFlag::standard(n);
    CHECK(is_lagrangian(f.subspace(n)));
    CHECK(subspace_intersection_dimension(f.subspace(n), delta_frame(n).columns()) == n);
  }
  Mat bad = Mat::Identity(4, 4);
  CHECK_THROWS_AS(IsotropicFlag{bad}, Error);
  CHECK_THROWS_AS(IsotropicFlag(Mat::Zero(4, 4)), Error);
}

TEST_CASE("Schubert membership examples") {
  std::mt19937_64 rng(5);
  const auto flag = IsotropicFlag::standard(2);
  const SymmetricPartition zero({0, 0}), train({1, 0}), line({2, 1}), top({2, 2});
  for (int trial = 0; trial < 20; ++trial) {
    const auto l = random_graph(2, rng);
    CHECK(schubert_membership(l, flag, zero));
    CHECK_FALSE(schubert_membership(l, flag, line));
  }
  CHECK(schubert_membership(delta_frame(2), flag, top));
  CHECK_FALSE(schubert_membership(pi_frame(2), flag, train));

  // Y_(2,1): planes containing p_1 inside span(p_1, p_2, x_2), the graphs of multiples of e_2 e_2^T over span(x_2)
  for (double c : {-2.0, 0.5, 3.0}) {
    Mat f = Mat::Zero(4, 2);
    f(2, 0) = 1.0;
    f(1, 1) = 1.0;
    f(3, 1) = c;
    CHECK(schubert_membership(LagrangianFrame(f), flag, line));
    CHECK_FALSE(schubert_membership(LagrangianFrame(f), flag, top));
  }
}

TEST_CASE("Schubert membership is monotone") {
  std::mt19937_64 rng(17);
  for (int n = 2; n <= 4; ++n) {
    const auto flag = IsotropicFlag::standard(n);
    const auto cells = enumerate_symmetric_partitions(n);
    for (int trial = 0; trial < 100; ++trial) {
      const auto& b = cells[rng() % cells.size()];
      const auto l = random_schubert_member(flag, b, rng);
      REQUIRE(schubert_membership(l, flag, b));
      for (const auto& a : cells)
        if (a.contained_in(b)) CHECK(schubert_membership(l, flag, a));
      // a random member of Y_b lies in no smaller cell
      for (const auto& a : cells)
        if (b.contained_in(a) && !(a == b)) CHECK_FALSE(schubert_membership(l, flag, a));
    }
  }
}
