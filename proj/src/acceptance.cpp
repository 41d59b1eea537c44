#include "maslovkit/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "maslovkit/core.hpp"
#include "maslovkit/errors.hpp"
#include "maslovkit/maslov.hpp"
#include "maslovkit/morse.hpp"
#include "maslovkit/pencils.hpp"
#include "maslovkit/schubert.hpp"
#include "maslovkit/srgeo.hpp"

namespace maslovkit {
namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

Mat gaussian(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(r, c);
  for (auto& v : m.reshaped()) v = g(rng);
  return m;
}

Mat random_sym(int n, std::mt19937_64& rng) {
  const Mat g = gaussian(n, n, rng);
  return 0.5 * (g + g.transpose());
}

Mat random_inv(int n, std::mt19937_64& rng) {
  for (;;) {
    const Mat a = gaussian(n, n, rng);
    const Vec s = singular_values(a);
    if (s(s.size() - 1) > 0.1 * s(0)) return a;
  }
}

double circular_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

// Parameters in [0, 1) where the x-component of the tangent vanishes.
std::vector<double> vertical_tangencies(const PlaneCurve& c) {
  std::vector<double> out;
  const int m = 4096;
  auto tx = [&](double t) { return c.tangent(t).x(); };
  for (int i = 0; i < m; ++i) {
    double a = double(i) / m, b = double(i + 1) / m;
    double fa = tx(a), fb = tx(b);
    if (fa == 0.0) {
      out.push_back(a);
      continue;
    }
    if (fa * fb > 0 || fb == 0.0) continue;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b), fm = tx(mid);
      (fa * fm <= 0 ? b : a) = mid;
      if (fa * fm > 0) fa = fm;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

// d exp / d p0 for the Heisenberg group at the origin, p0 = (a, b, theta).
double heisenberg_jacobi_det(double a, double b, double th, double t) {
  using cd = std::complex<double>;
  const cd e = std::exp(cd(0, th * t));
  const cd g = (e - 1.0) / cd(0, th);
  const cd g_th = (th * t * e + cd(0, 1) * (e - 1.0)) / (th * th);
  const double h = (th * t - std::sin(th * t)) / (2 * th * th);
  const double h_th = t * (1 - std::cos(th * t)) / (2 * th * th) - (th * t - std::sin(th * t)) / (th * th * th);
  const cd zeta(a, b);
  Eigen::Matrix3d m;
  m << g.real(), -g.imag(), (zeta * g_th).real(), g.imag(), g.real(), (zeta * g_th).imag(), 2 * a * h, 2 * b * h,
      (a * a + b * b) * h_th;
  return m.determinant();
}

// First sign change of the closed-form determinant after t = 0, bisected.
double oracle_first_conjugate(double a, double b, double th, double t_max) {
  const int m = 20000;
  double prev_t = t_max / m, prev = heisenberg_jacobi_det(a, b, th, prev_t);
  for (int i = 2; i <= m; ++i) {
    const double t = t_max * i / m, d = heisenberg_jacobi_det(a, b, th, t);
    if (prev * d <= 0) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (heisenberg_jacobi_det(a, b, th, mid) * prev > 0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev = d;
  }
  return std::nan("");
}

void criterion1(Outcome& o, std::uint64_t seed, std::vector<std::array<int, 2>>* bounds) {
  std::mt19937_64 rng(seed + 1);
  int checked = 0, rejected = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 100;) {
      auto [loop, expected] = random_closed_loop(n, rng);
      int w = 0, c = 0;
      CrossingBound b;
      try {
        w = maslov_index_winding(loop);
        c = maslov_index_crossings(loop, delta_frame(n));
        b = crossing_count_bound(loop, delta_frame(n));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonGeneric && e.kind() != ErrorKind::TangentialCrossing) throw;
        ++rejected;
        continue;
      }
      o.require(w == c, "winding " + std::to_string(w) + " != crossings " + std::to_string(c));
      o.require(w == expected, "winding differs from the constructed index");
      if (bounds) bounds->push_back({b.abs_index, b.crossing_count});
      ++checked;
      ++trial;
    }
  }
  o.detail << checked << " loops agree (" << rejected << " non-generic draws replaced)";
}

void criterion2(Outcome& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 2);
  for (int n = 1; n <= 4; ++n) {
    const auto loop = rotation_loop(n);
    const auto delta = n == 1 ? delta_frame(1) : delta_frame(n).transformed(random_symplectic(n, 0.2, rng));
    const int w = maslov_index_winding(loop), c = maslov_index_crossings(loop, delta);
    o.require(w == n && c == n, "rotation n=" + std::to_string(n));
    o.detail << "n=" << n << ":(" << w << "," << c << ") ";
  }
}

void criterion3(Outcome& o, std::uint64_t seed) {
  std::vector<std::array<int, 2>> bounds;
  Outcome inner;
  criterion1(inner, seed, &bounds);
  o.require(inner.pass, "criterion-1 loops");
  int strict = 0;
  for (const auto& b : bounds) {
    o.require(b[0] <= b[1], "|index| > crossing count");
    if (b[0] < b[1]) ++strict;
  }
  const auto eight = gauss_loop_from_plane_curve(figure_eight_curve());
  const auto b = crossing_count_bound(eight, delta_frame(1));
  o.require(b.abs_index == 0 && b.crossing_count == 2, "figure-eight bound");
  o.detail << bounds.size() << " loops bounded (" << strict << " strict); figure-eight (" << b.abs_index << ", "
           << b.crossing_count << ")";
}

void criterion4(Outcome& o) {
  const auto circle = circle_curve();
  const auto loop = gauss_loop_from_plane_curve(circle);
  const int w = maslov_index_winding(loop), c = maslov_index_crossings(loop, delta_frame(1));
  o.require(w == 2 && c == 2, "circle index");
  const auto cs = find_crossings(loop, delta_frame(1));
  const auto tangencies = vertical_tangencies(circle);
  o.require(cs.size() == tangencies.size(), "crossing count vs vertical tangencies");
  double worst = 0.0;
  for (const auto& x : cs) {
    double best = 1.0;
    for (double t : tangencies) best = std::min(best, circular_distance(x.t, t));
    worst = std::max(worst, best);
  }
  o.require(worst <= 1e-8, "crossing parameters");
  const auto eight = gauss_loop_from_plane_curve(figure_eight_curve());
  const int we = maslov_index_winding(eight), ce = maslov_index_crossings(eight, delta_frame(1));
  o.require(we == 0 && ce == 0, "figure-eight index");
  o.detail << "circle (" << w << "," << c << ") max parameter error " << worst << "; figure-eight (" << we << ","
           << ce << ")";
}

void criterion5(Outcome& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    const Mat S = random_sym(n, rng), A = random_inv(n, rng), B = random_sym(n, rng);
    Mat T = Mat::Zero(2 * n, 2 * n);
    T.topLeftCorner(n, n) = A.inverse();
    T.topRightCorner(n, n) = B * A.transpose();
    T.bottomRightCorner(n, n) = A.transpose();
    Mat oracle;
    try {
      oracle = chart_from_frame(frame_from_chart(SymmetricChart(S)).transformed(T)).S();
    } catch (const Error&) {
      --trial;
      continue;
    }
    const Mat got = change_chart(S, A, B);
    worst = std::max(worst, (got - oracle).norm() / std::max(1.0, oracle.norm()));
  }
  o.require(worst <= 1e-9, "change_chart error");

  int ok = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 4;
    const int k = 1 + static_cast<int>(rng() % n);
    const auto delta = delta_frame(n), pi = pi_frame(n);
    const Mat O = Eigen::HouseholderQR<Mat>(gaussian(n, n, rng)).householderQ();
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = i < k ? 0.0 : (i % 2 ? -1.0 : 1.0) * (1.0 + i);
    const Mat S0 = O * d.asDiagonal() * O.transpose();
    const Splitting over_delta(delta, pi);
    const LocalSubmersion phi(frame_from_chart(SymmetricChart(S0), over_delta), delta, pi);
    const int r = static_cast<int>(rng() % (k + 1));
    Eigen::SelfAdjointEigenSolver<Mat> eig(S0 + 0.05 * random_sym(n, rng) / std::sqrt(double(n)));
    Vec ev = eig.eigenvalues();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(ev(a)) < std::abs(ev(b)); });
    for (int i = 0; i < r; ++i) ev(order[i]) = 0.0;
    const Mat Sp = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    const auto plane = frame_from_chart(SymmetricChart(Sp), over_delta);
    // k - dim ker phi(P) counts the dimensions lost from the base intersection
    const int dim_meet = subspace_intersection_dimension(plane.orthonormal(), delta.columns());
    if (phi.kernel_dimension(plane) == dim_meet && dim_meet == r) ++ok;
  }
  o.require(ok == 500, "kernel identity");
  o.detail << "change_chart max rel error " << worst << " on 1000; kernel identity " << ok << "/500";
}

void criterion6(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = example_pencil();
  const auto s = stratify(p, SphereMesh::icosphere(6));
  const auto est = sample_base_locus_b0(p, {});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(s.ovals.size() == 2, "oval count");
  if (s.ovals.size() == 2) o.require(s.ovals[0].sign == -s.ovals[1].sign, "opposite signs");
  const int bound = duality_bound(s);
  o.require(bound == 4, "bound value");
  o.require(est.b0 == 0, "b0(X_W)");
  o.require(bound >= est.b0, "bound >= b0");
  o.require(secs < 10.0, "runtime");
  o.detail << s.ovals.size() << " ovals signs";
  for (const auto& ov : s.ovals) o.detail << " " << (ov.sign > 0 ? "+" : "-");
  o.detail << "; bound " << bound << " >= b0 " << est.b0 << "; level 6 in " << secs << " s";
}

void criterion7(Outcome& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 7);
  const SphereMesh coarse = SphereMesh::icosphere(5), fine = SphereMesh::icosphere(6);
  int done = 0, rejected = 0, inconclusive = 0, unstable = 0;
  while (done < 100) {
    const int n = 1 + done % 5;
    std::vector<Mat> forms;
    for (int i = 0; i < 3; ++i) forms.push_back(random_sym(n, rng));
    const Pencil p(forms);
    StratifiedSphere a, b;
    try {
      a = stratify(p, coarse);
      b = stratify(p, fine);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonGeneric) throw;
      ++rejected;
      continue;
    }
    BaseLocusOptions opt;
    opt.seed = seed * 1000 + done + 1;
    const auto est = sample_base_locus_b0(p, opt);
    if (est.inconclusive) ++inconclusive;
    if (est.unstable) ++unstable;
    const int bound = duality_bound(b);
    o.require(bound == n + static_cast<int>(b.ovals.size()), "bound formula");
    o.require(est.b0 <= bound, "b0 " + std::to_string(est.b0) + " > bound " + std::to_string(bound));
    o.require(a.ovals.size() == b.ovals.size(), "oval count changed under refinement");
    ++done;
  }
  o.detail << done << " pencils (n=1..5), levels 5/6 stable; " << rejected << " non-generic draws replaced, "
           << inconclusive << " empty base loci, " << unstable << " without radius plateau";
}

void criterion8(Outcome& o) {
  const auto f = cubic_fold_family();
  const auto curve = continue_curve(f, MultiplierPoint{-1.0, 3.0, Vec::Ones(1)});
  const auto folds = detect_folds(curve, f);
  o.require(folds.size() == 1, "cubic fold count");
  if (folds.size() == 1) {
    o.require(std::abs(folds[0].t) <= 1e-6, "cubic fold location");
    const auto prof = index_profile(curve, f, folds);
    const std::set<int> branch{prof.jumps.at(0).before, prof.jumps.at(0).after};
    o.require(branch == std::set<int>{0, 1}, "cubic branch indices");
    o.detail << "cubic fold at t=" << folds[0].t << " indices {0,1}; ";
  }
  for (int sign : {1, -1}) {
    const auto g = fold_normal_form(2, 0.0, -1, {sign});
    Vec x0(2);
    x0 << 0.5, 0.0;
    const auto c = continue_curve(g, seed_point(g, 0.75, x0));
    const auto gf = detect_folds(c, g);
    o.require(gf.size() == 1, "normal form fold count");
    if (gf.size() != 1) continue;
    const auto prof = index_profile(c, g, gf);
    o.require(prof.jumps.size() == 1 && std::abs(prof.jumps[0].after - prof.jumps[0].before) == 1, "jump of one");
    o.detail << "normal form sign " << sign << ": jump " << prof.jumps[0].before << "->" << prof.jumps[0].after
             << "; ";
  }
}

void criterion9(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto h = FrameStructure::heisenberg();
  for (double th : {1.0, 2.0, 2 * kPi}) {
    const double oracle = oracle_first_conjugate(1.0, 0.0, th, 1.5 * 2 * kPi / th);
    o.require(std::abs(oracle - 2 * kPi / th) <= 1e-9 * oracle, "closed-form oracle");
    Vec p0(3);
    p0 << 1.0, 0.0, th;
    const auto ct = conjugate_times(h, Vec::Zero(3), p0, 1.2 * oracle);
    o.require(!ct.empty(), "no conjugate time found");
    if (ct.empty()) continue;
    const double rel = std::abs(ct[0].t - oracle) / oracle;
    o.require(rel <= 1e-4, "relative error");
    o.detail << "theta=" << th << " rel err " << rel << "; ";
  }
  for (int n : {2, 3}) {
    const auto e = FrameStructure::euclidean(n);
    o.require(conjugate_times(e, Vec::Zero(n), Vec::Ones(n), 10.0).empty(), "euclidean conjugate time");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 30.0, "runtime");
  o.detail << "euclidean none to T=10; " << secs << " s";
}

void criterion10(Outcome& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 10);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> theta(1.0, 8.0), horizon(0.5, 2.5);
  const auto h = FrameStructure::heisenberg();
  int total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Vec p0(3), x0(3);
    p0 << g(rng), g(rng), (trial % 2 ? -1 : 1) * theta(rng);
    x0 << g(rng), g(rng), g(rng);
    const double T = horizon(rng) * 2 * kPi / std::abs(p0(2));
    const JacobiSystem j(h, {x0, p0}, T);
    int count = 0;
    for (const auto& c : conjugate_times(j)) count += c.multiplicity;
    const int m = maslov_count(j);
    o.require(m == count, "covector " + std::to_string(trial));
    total += count;
  }
  o.detail << "20 covectors, " << total << " conjugate times matched; ";
  for (double th : {2 * kPi, 3.0}) {
    Vec p0(3);
    p0 << 0.6, 0.8, th;
    const double s_conj = 2 * kPi / th;
    const double before = restricted_hessian_min_eig(h, Vec::Zero(3), p0, s_conj - 0.05, 32);
    const double after = restricted_hessian_min_eig(h, Vec::Zero(3), p0, s_conj + 0.05, 32);
    o.require(before > 0 && after < 0, "restricted Hessian sign change");
    o.detail << "theta=" << th << " min eig " << before << " -> " << after << "; ";
  }
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

void criterion11(Outcome& o) {
  for (int n = 1; n <= 12; ++n) {
    o.require(enumerate_symmetric_partitions(n).size() == (std::size_t{1} << n), "count n=" + std::to_string(n));
    const auto p = poincare_polynomial(n);
    o.require(p == product_expansion(n), "Poincare n=" + std::to_string(n));
    std::uint64_t total = 0;
    for (auto c : p) total += c;
    o.require(total == (std::uint64_t{1} << n), "total Betti n=" + std::to_string(n));
  }
  const auto two = enumerate_symmetric_partitions(2);
  const std::vector<std::vector<int>> table{{0, 0}, {1, 0}, {2, 1}, {2, 2}};
  o.require(two.size() == 4, "n=2 table size");
  for (std::size_t i = 0; i < std::min<std::size_t>(4, two.size()); ++i) {
    o.require(two[i].parts() == table[i] && two[i].codim() == static_cast<int>(i), "n=2 row");
    o.detail << two[i].to_string() << ":" << two[i].codim() << " ";
  }
  o.detail << "; n<=12 counts and polynomials match";
}

const char* kNames[kCriterionCount] = {
    "maslov index algorithms agree on random loops",
    "rotation loop generates with index n",
    "index bounded by crossing count",
    "gauss loops of plane curves",
    "chart changes and local submersion",
    "example pencil ovals and duality bound",
    "random pencil duality bound and refinement",
    "morse folds and index jumps",
    "heisenberg first conjugate time",
    "jacobi maslov count and restricted hessian",
    "schubert cells and poincare polynomial",
};

}  // namespace

std::string format_result(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
  char tail[32];
  std::snprintf(tail, sizeof tail, " (%.2f s) ", r.seconds);
  return std::string(head) + r.name + tail + r.detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
      continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (id) {
        case 1: {
          criterion1(o, options.seed, nullptr);
          const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          o.require(secs < 60.0, "runtime");
          break;
        }
        case 2: criterion2(o, options.seed); break;
        case 3: criterion3(o, options.seed); break;
        case 4: criterion4(o); break;
        case 5: criterion5(o, options.seed); break;
        case 6: criterion6(o); break;
        case 7: criterion7(o, options.seed); break;
        case 8: criterion8(o); break;
        case 9: criterion9(o); break;
        case 10: criterion10(o, options.seed); break;
        case 11: criterion11(o); break;
      }
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    CriterionResult r;
    r.id = id;
    r.name = kNames[id - 1];
    r.pass = o.pass;
    r.detail = o.detail.str();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace maslovkit
