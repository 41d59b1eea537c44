#include "maslovkit/morse.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "maslovkit/errors.hpp"

namespace maslovkit {
namespace {

Vec pack(double lambda, double t, const Vec& x) {
  Vec z(x.size() + 2);
  z << lambda, t, x;
  return z;
}

// Residual and its Jacobian in z = (lambda, t, x).
struct Linearization {
  Vec g;
  Mat dg;
  Jet jet;
};

Linearization linearize(const MorseFamily& family, const Vec& z) {
  const int n = family.n();
  const Vec x = z.tail(n);
  Linearization out;
  out.jet = family.jet(z(1), x);
  const Jet& j = out.jet;
  out.g.resize(n + 1);
  out.g << z(0) - j.ft, j.fx;
  out.dg = Mat::Zero(n + 1, n + 2);
  out.dg(0, 0) = 1.0;
  out.dg(0, 1) = -j.ftt;
  out.dg.block(0, 2, 1, n) = -j.ftx.transpose();
  out.dg.block(1, 1, n, 1) = j.ftx;
  out.dg.block(1, 2, n, n) = j.fxx;
  return out;
}

Vec tangent(const Mat& dg) {
  Eigen::JacobiSVD<Mat> svd(dg, Eigen::ComputeFullV);
  return svd.matrixV().col(dg.cols() - 1);
}

double regularity_margin(const Jet& j) {
  Mat m(j.fxx.rows(), j.fxx.cols() + 1);
  m << j.ftx, j.fxx;
  const Vec s = singular_values(m);
  return s(s.size() - 1) / std::max(1.0, s(0));
}

// Newton on G(z) = 0 with the extra equation normal . (z - anchor) = 0.
std::optional<Vec> correct(const MorseFamily& family, const Vec& anchor, const Vec& normal,
                           const ContinuationOptions& opt) {
  Vec z = anchor;
  auto full_residual = [&](const Linearization& l, const Vec& zz) {
    Vec r(l.g.size() + 1);
    r << l.g, normal.dot(zz - anchor);
    return r;
  };
  Linearization lin = linearize(family, z);
  Vec r = full_residual(lin, z);
  for (int it = 0; it < opt.newton_iterations; ++it) {
    if (!r.allFinite()) return std::nullopt;
    if (lin.g.cwiseAbs().maxCoeff() <= opt.tol && std::abs(r(r.size() - 1)) <= opt.tol) return z;
    Mat a(lin.dg.rows() + 1, lin.dg.cols());
    a << lin.dg, normal.transpose();
    const Vec dz = a.partialPivLu().solve(-r);
    if (!dz.allFinite()) return std::nullopt;
    double damping = 1.0;
    for (int k = 0; k < 12; ++k, damping *= 0.5) {
      const Vec trial = z + damping * dz;
      Linearization tl = linearize(family, trial);
      const Vec tr = full_residual(tl, trial);
      if (tr.allFinite() && tr.norm() < r.norm() * (1.0 - 1e-4 * damping) + 1e-15) {
        z = trial;
        lin = std::move(tl);
        r = tr;
        break;
      }
      if (k == 11) return std::nullopt;
    }
  }
  if (lin.g.cwiseAbs().maxCoeff() <= opt.tol) return z;
  return std::nullopt;
}

void require_regular(const Jet& j, double t) {
  if (regularity_margin(j) <= 1e-8)
    throw Error(ErrorKind::SingularMultiplier,
                "rank of [d_tx f | d_xx f] drops below n at t = " + std::to_string(t));
}

int negative_count(const Mat& h) {
  const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues();
  int c = 0;
  for (double l : ev)
    if (l < 0) ++c;
  return c;
}

int det_sign(const Mat& h) { return negative_count(h) % 2 == 0 ? 1 : -1; }

MultiplierPoint to_point(const MorseFamily& family, const Vec& z, double s) {
  const int n = family.n();
  MultiplierPoint p{z(0), z(1), z.tail(n), s, 0};
  p.index = negative_count(family.jet(p.t, p.x).fxx);
  return p;
}

Polynomial poly_from(int vars, std::initializer_list<std::pair<double, std::vector<int>>> terms) {
  Polynomial p(vars);
  for (const auto& [c, pw] : terms) p.add_term(c, pw);
  return p;
}

}  // namespace

bool Box::contains(double t, const Vec& x) const {
  if (t < t_min || t > t_max) return false;
  for (double v : x)
    if (v < x_min || v > x_max) return false;
  return true;
}

MorseFamily::MorseFamily(int n, Polynomial f, Box box, std::string name)
    : n_(n), poly_(std::make_shared<const Polynomial>(std::move(f))), box_(box), name_(std::move(name)) {
  if (n < 1) throw Error(ErrorKind::Family, "state dimension must be positive");
  if (poly_->variables() != n + 1)
    throw Error(ErrorKind::Family, "polynomial must be in the variables (t, x_1, ..., x_n)");
}

MorseFamily::MorseFamily(int n, Scalar f, Box box, std::string name, double fd_step)
    : n_(n), f_(std::move(f)), box_(box), name_(std::move(name)), fd_step_(fd_step) {
  if (n < 1) throw Error(ErrorKind::Family, "state dimension must be positive");
  if (!f_) throw Error(ErrorKind::Family, "family callable is empty");
}

double MorseFamily::value(double t, const Vec& x) const {
  if (x.size() != n_) throw Error(ErrorKind::Shape, "state has the wrong dimension");
  if (poly_) return (*poly_)(pack(0.0, t, x).tail(n_ + 1));
  const double v = f_(t, x);
  if (!std::isfinite(v)) throw Error(ErrorKind::Family, "family value is not finite");
  return v;
}

Jet MorseFamily::jet(double t, const Vec& x) const {
  if (x.size() != n_) throw Error(ErrorKind::Shape, "state has the wrong dimension");
  Vec y(n_ + 1);
  y << t, x;
  Vec g;
  Mat h;
  double f;
  if (poly_) {
    f = (*poly_)(y);
    g = poly_->gradient(y);
    h = poly_->hessian(y);
  } else {
    auto eval = [&](const Vec& p) { return value(p(0), p.tail(n_)); };
    const int d = n_ + 1;
    f = eval(y);
    g.resize(d);
    h.resize(d, d);
    Vec step(d);
    for (int i = 0; i < d; ++i) step(i) = fd_step_ * std::max(1.0, std::abs(y(i)));
    for (int i = 0; i < d; ++i) {
      Vec p = y, m = y;
      p(i) += step(i);
      m(i) -= step(i);
      const double fp = eval(p), fm = eval(m);
      g(i) = (fp - fm) / (2 * step(i));
      h(i, i) = (fp - 2 * f + fm) / (step(i) * step(i));
      for (int j = 0; j < i; ++j) {
        Vec pp = y, pm = y, mp = y, mm = y;
        pp(i) += step(i), pp(j) += step(j);
        pm(i) += step(i), pm(j) -= step(j);
        mp(i) -= step(i), mp(j) += step(j);
        mm(i) -= step(i), mm(j) -= step(j);
        h(i, j) = h(j, i) = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4 * step(i) * step(j));
      }
    }
  }
  Jet j;
  j.f = f;
  j.ft = g(0);
  j.fx = g.tail(n_);
  j.ftt = h(0, 0);
  j.ftx = h.col(0).tail(n_);
  j.fxx = h.bottomRightCorner(n_, n_);
  if (!g.allFinite() || !h.allFinite()) throw Error(ErrorKind::Family, "derivative evaluation failed");
  return j;
}

MorseFamily cubic_fold_family() {
  return MorseFamily(1, poly_from(2, {{1.0, {0, 3}}, {-1.0, {1, 1}}}), Box{-4, 4, -2, 2}, "cubic_fold");
}

MorseFamily quadratic_family() {
  return MorseFamily(1, poly_from(2, {{1.0, {0, 2}}, {1.0, {1, 0}}}), Box{-1, 1, -1, 1}, "quadratic");
}

MorseFamily fold_normal_form(int n, double c0, int t_sign, std::vector<int> signs) {
  if (n < 1) throw Error(ErrorKind::Family, "state dimension must be positive");
  if (signs.empty()) signs.assign(n - 1, 1);
  if (static_cast<int>(signs.size()) != n - 1)
    throw Error(ErrorKind::Family, "normal form needs n - 1 quadratic signs");
  if (t_sign != 1 && t_sign != -1) throw Error(ErrorKind::Family, "t sign must be +1 or -1");
  Polynomial p(n + 1);
  std::vector<int> pw(n + 1, 0);
  p.add_term(c0, pw);
  pw[1] = 3;
  p.add_term(1.0, pw);
  pw[1] = 1;
  pw[0] = 1;
  p.add_term(t_sign, pw);
  for (int i = 2; i <= n; ++i) {
    if (signs[i - 2] != 1 && signs[i - 2] != -1) throw Error(ErrorKind::Family, "signs must be +1 or -1");
    std::vector<int> q(n + 1, 0);
    q[i] = 2;
    p.add_term(signs[i - 2], q);
  }
  return MorseFamily(n, p, Box{-1, 1, -1.5, 1.5}, "normal_form");
}

MorseFamily circle_family() {
  return MorseFamily(1, poly_from(2, {{1.0 / 3.0, {0, 3}}, {1.0, {2, 1}}, {-1.0, {0, 1}}}),
                     Box{-2, 2, -2, 2}, "circle");
}

double derivative_mismatch(const MorseFamily& family, int probes, std::mt19937_64& rng) {
  const Box& b = family.box();
  std::uniform_real_distribution<double> ut(b.t_min, b.t_max), ux(b.x_min, b.x_max);
  const int n = family.n();
  double worst = 0.0;
  auto rel = [](double a, double ref) { return std::abs(a - ref) / std::max(1.0, std::abs(ref)); };
  for (int k = 0; k < probes; ++k) {
    const double t = ut(rng);
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = ux(rng);
    const Jet j = family.jet(t, x);
    const double h = 1e-5;
    worst = std::max(worst, rel(j.ft, (family.value(t + h, x) - family.value(t - h, x)) / (2 * h)));
    const Jet jp = family.jet(t + h, x), jm = family.jet(t - h, x);
    worst = std::max(worst, rel(j.ftt, (jp.ft - jm.ft) / (2 * h)));
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      worst = std::max(worst, rel(j.fx(i), (family.value(t, xp) - family.value(t, xm)) / (2 * h)));
      worst = std::max(worst, rel(j.ftx(i), (jp.fx(i) - jm.fx(i)) / (2 * h)));
      const Jet ip = family.jet(t, xp), im = family.jet(t, xm);
      for (int l = 0; l < n; ++l) worst = std::max(worst, rel(j.fxx(l, i), (ip.fx(l) - im.fx(l)) / (2 * h)));
    }
  }
  return worst;
}

Vec residual(const MorseFamily& family, double lambda, double t, const Vec& x) {
  return linearize(family, pack(lambda, t, x)).g;
}

bool morse_regularity(const MorseFamily& family, double t, const Vec& x, double tol) {
  return regularity_margin(family.jet(t, x)) > tol;
}

int morse_index(const MorseFamily& family, double t, const Vec& x) {
  return negative_count(family.jet(t, x).fxx);
}

MultiplierPoint seed_point(const MorseFamily& family, double t, const Vec& x0, double tol) {
  Vec x = x0;
  for (int it = 0; it < 100; ++it) {
    const Jet j = family.jet(t, x);
    if (j.fx.cwiseAbs().maxCoeff() <= tol) return to_point(family, pack(j.ft, t, x), 0.0);
    x -= j.fxx.completeOrthogonalDecomposition().solve(j.fx);
    if (!x.allFinite()) break;
  }
  throw Error(ErrorKind::Convergence, "Newton did not find a critical point of f_t");
}

MultiplierCurve continue_curve(const MorseFamily& family, const MultiplierPoint& seed,
                               const ContinuationOptions& opt) {
  const int n = family.n();
  if (seed.x.size() != n) throw Error(ErrorKind::Shape, "seed has the wrong dimension");
  const Vec z0 = pack(seed.lambda, seed.t, seed.x);
  const Linearization lin0 = linearize(family, z0);
  if (lin0.g.cwiseAbs().maxCoeff() > std::max(opt.tol, 1e-8))
    throw Error(ErrorKind::Invariant, "seed is not on the multiplier curve");
  require_regular(lin0.jet, seed.t);

  Vec tau0 = tangent(lin0.dg);
  const Eigen::Index lead = std::abs(tau0(1)) > 1e-12 ? 1 : 2;
  if (tau0(lead) < 0) tau0 = -tau0;

  MultiplierCurve curve;
  std::vector<MultiplierPoint> forward, backward;

  for (int dir : {1, -1}) {
    if (dir == -1 && curve.closed) break;
    auto& out = dir == 1 ? forward : backward;
    Vec z = z0;
    Vec tau = dir * tau0;
    double s = 0.0;
    double h = opt.step;
    int halvings = 0;
    while (std::abs(s) < opt.s_max) {
      const auto next = correct(family, z + h * tau, tau, opt);
      if (!next) {
        if (++halvings > opt.max_halvings)
          throw Error(ErrorKind::Convergence, "corrector failed after repeated step halving");
        h *= 0.5;
        continue;
      }
      const Vec& zn = *next;
      const Vec xn = zn.tail(n);
      if (!family.box().contains(zn(1), xn)) {
        (dir == 1 ? curve.left_box_forward : curve.left_box_backward) = true;
        break;
      }
      const Linearization ln = linearize(family, zn);
      require_regular(ln.jet, zn(1));
      Vec tn = tangent(ln.dg);
      if (tn.dot(tau) < 0) tn = -tn;
      s += dir * (zn - z).norm();
      out.push_back(to_point(family, zn, s));
      z = zn;
      tau = tn;
      halvings = 0;
      h = std::min(opt.step, 2 * h);
      if (dir == 1 && std::abs(s) > 3 * opt.step && (z - z0).norm() < 0.75 * opt.step) {
        curve.closed = true;
        // the last point duplicates the seed up to the step; drop it
        out.pop_back();
        break;
      }
    }
  }
  MultiplierPoint first = to_point(family, z0, 0.0);
  for (auto it = backward.rbegin(); it != backward.rend(); ++it) curve.points.push_back(*it);
  curve.points.push_back(first);
  for (const auto& p : forward) curve.points.push_back(p);
  return curve;
}

std::vector<Fold> detect_folds(const MultiplierCurve& curve, const MorseFamily& family, double s_tol) {
  const int n = family.n();
  const auto& pts = curve.points;
  std::vector<Fold> folds;
  if (pts.size() < 2) return folds;
  std::vector<int> sign(pts.size());
  std::vector<double> rel_det(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Mat h = family.jet(pts[i].t, pts[i].x).fxx;
    sign[i] = det_sign(h);
    rel_det[i] = std::abs(h.determinant()) / std::max(1.0, std::pow(h.norm(), n));
  }
  ContinuationOptions opt;
  const std::size_t segments = curve.closed ? pts.size() : pts.size() - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const std::size_t j = (i + 1) % pts.size();
    if (sign[i] == sign[j]) continue;
    const Vec za = pack(pts[i].lambda, pts[i].t, pts[i].x);
    const Vec zb = pack(pts[j].lambda, pts[j].t, pts[j].x);
    const double len = (zb - za).norm();
    const Vec d = (zb - za) / len;
    double lo = 0.0, hi = 1.0;
    Vec z_best = za;
    while ((hi - lo) * len > s_tol) {
      const double mid = 0.5 * (lo + hi);
      const auto zm = correct(family, za + mid * (zb - za), d, opt);
      if (!zm) throw Error(ErrorKind::Convergence, "fold refinement left the curve");
      z_best = *zm;
      if (det_sign(family.jet(zm->coeff(1), zm->tail(n)).fxx) == sign[i])
        lo = mid;
      else
        hi = mid;
    }
    const double ds = curve.closed && j == 0 ? len : pts[j].s - pts[i].s;
    folds.push_back(Fold{pts[i].s + 0.5 * (lo + hi) * ds, z_best(1), z_best(0), z_best.tail(n),
                         static_cast<int>(i), false});
  }
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (rel_det[i] <= 1e-8 && sign[i - 1] == sign[i] && sign[i] == sign[i + 1] &&
        rel_det[i] <= rel_det[i - 1] && rel_det[i] <= rel_det[i + 1])
      folds.push_back(Fold{pts[i].s, pts[i].t, pts[i].lambda, pts[i].x, static_cast<int>(i), true});
  }
  std::sort(folds.begin(), folds.end(), [](const Fold& a, const Fold& b) { return a.segment < b.segment; });
  return folds;
}

IndexProfile index_profile(const MultiplierCurve& curve, const MorseFamily& family,
                           const std::vector<Fold>& folds) {
  IndexProfile prof;
  const auto& pts = curve.points;
  for (const auto& p : pts) prof.index.push_back(morse_index(family, p.t, p.x));
  std::vector<const Fold*> at_segment(pts.size(), nullptr);
  for (const auto& f : folds)
    if (!f.tangential) at_segment.at(f.segment) = &f;
  const std::size_t segments = curve.closed ? pts.size() : (pts.empty() ? 0 : pts.size() - 1);
  for (std::size_t i = 0; i < segments; ++i) {
    const std::size_t j = (i + 1) % pts.size();
    const int before = prof.index[i], after = prof.index[j];
    const Fold* f = at_segment[i];
    if (!f) {
      if (before != after)
        throw Error(ErrorKind::NonGeneric, "Morse index changes away from a fold");
      continue;
    }
    if (std::abs(after - before) != 1)
      throw Error(ErrorKind::NonGeneric, "Morse index does not change by one across a fold");
    prof.jumps.push_back({f->s, before, after});
  }
  return prof;
}

}  // namespace maslovkit
