#include "maslovkit/srgeo.hpp"

#include <algorithm>
#include <cmath>

#include "maslovkit/core.hpp"
#include "maslovkit/errors.hpp"
#include "maslovkit/maslov.hpp"

namespace maslovkit {
namespace {

// Relative corank threshold for the x-block at a conjugate time.
constexpr double kCorankTol = 1e-5;

// Sign checks of the Jacobi determinant start this many grid steps after 0,
// where the vertical frame has only just left the vertical.
constexpr int kSkipSteps = 16;

struct Derivs {
  Vec dx;
  Vec dp;
  Mat dv;
};

// Right-hand side of the Hamiltonian system and, when v is given, of its
// linearization acting on the 2n x n frame v.
Derivs rhs(const FrameStructure& s, const Vec& x, const Vec& p, const Mat* v) {
  const int n = s.n();
  Derivs d;
  d.dx = Vec::Zero(n);
  d.dp = Vec::Zero(n);
  Mat a_mat = Mat::Zero(n, n), hpp = Mat::Zero(n, n), hxx = Mat::Zero(n, n);
  for (int i = 0; i < s.k(); ++i) {
    const FieldJet j = s.field_jet(i, x, v != nullptr);
    const double u = p.dot(j.f);
    const Vec a = j.df.transpose() * p;
    d.dx += u * j.f;
    d.dp -= u * a;
    if (!v) continue;
    a_mat += j.f * a.transpose() + u * j.df;
    hpp += j.f * j.f.transpose();
    hxx += a * a.transpose();
    for (int c = 0; c < n; ++c) hxx += (u * p(c)) * j.d2f[c];
  }
  if (v) {
    const Mat top = v->topRows(n), bottom = v->bottomRows(n);
    d.dv.resize(2 * n, n);
    d.dv.topRows(n) = a_mat * top + hpp * bottom;
    d.dv.bottomRows(n) = -hxx * top - a_mat.transpose() * bottom;
  }
  return d;
}

// One classical RK4 step of length h; v may be null.
void rk4_step(const FrameStructure& s, Vec& x, Vec& p, Mat* v, double h) {
  const Derivs k1 = rhs(s, x, p, v);
  Mat v2, v3, v4;
  if (v) v2 = *v + 0.5 * h * k1.dv;
  const Derivs k2 = rhs(s, x + 0.5 * h * k1.dx, p + 0.5 * h * k1.dp, v ? &v2 : nullptr);
  if (v) v3 = *v + 0.5 * h * k2.dv;
  const Derivs k3 = rhs(s, x + 0.5 * h * k2.dx, p + 0.5 * h * k2.dp, v ? &v3 : nullptr);
  if (v) v4 = *v + h * k3.dv;
  const Derivs k4 = rhs(s, x + h * k3.dx, p + h * k3.dp, v ? &v4 : nullptr);
  x += (h / 6) * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
  p += (h / 6) * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
  if (v) *v += (h / 6) * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
  if (!x.allFinite() || !p.allFinite() || (v && !v->allFinite()))
    throw Error(ErrorKind::Integration, "geodesic flow blew up");
}

Vec control_velocity(const FrameStructure& s, const Vec& x, const Vec& u) {
  Vec v = Vec::Zero(s.n());
  for (int i = 0; i < s.k(); ++i) v += u(i) * s.field(i, x);
  return v;
}

void control_step(const FrameStructure& s, Vec& x, const Vec& u0, const Vec& um, const Vec& u1, double h) {
  const Vec k1 = control_velocity(s, x, u0);
  const Vec k2 = control_velocity(s, x + 0.5 * h * k1, um);
  const Vec k3 = control_velocity(s, x + 0.5 * h * k2, um);
  const Vec k4 = control_velocity(s, x + h * k3, u1);
  x += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  if (!x.allFinite()) throw Error(ErrorKind::Integration, "control system blew up");
}

Vec flatten(const Mat& u) {
  Vec w(u.size());
  for (Eigen::Index j = 0; j < u.rows(); ++j) w.segment(j * u.cols(), u.cols()) = u.row(j).transpose();
  return w;
}

Mat unflatten(const Vec& w, Eigen::Index m, Eigen::Index k) {
  Mat u(m, k);
  for (Eigen::Index j = 0; j < m; ++j) u.row(j) = w.segment(j * k, k).transpose();
  return u;
}

Vec endpoint(const FrameStructure& s, const Vec& x0, const Mat& u, int substeps) {
  Vec x = x0;
  const double h = 1.0 / (static_cast<double>(u.rows()) * substeps);
  for (Eigen::Index j = 0; j < u.rows(); ++j) {
    const Vec uj = u.row(j).transpose();
    for (int q = 0; q < substeps; ++q) control_step(s, x, uj, uj, uj, h);
  }
  return x;
}

int default_substeps(Eigen::Index m) { return std::max(4, static_cast<int>(std::ceil(256.0 / m))); }

}  // namespace

FrameStructure::FrameStructure(int n, std::vector<std::vector<Polynomial>> fields, std::string name)
    : n_(n), k_(static_cast<int>(fields.size())), name_(std::move(name)), poly_(std::move(fields)) {
  if (n < 1 || k_ < 1 || k_ > n) throw Error(ErrorKind::Shape, "need 1 <= k <= n fields");
  for (const auto& f : poly_) {
    if (static_cast<int>(f.size()) != n) throw Error(ErrorKind::Shape, "field has the wrong number of components");
    for (const auto& c : f)
      if (c.variables() != n) throw Error(ErrorKind::Shape, "field component in the wrong variables");
  }
}

FrameStructure::FrameStructure(int n, std::vector<Field> fields, std::string name, double fd_step)
    : n_(n), k_(static_cast<int>(fields.size())), name_(std::move(name)), callables_(std::move(fields)),
      fd_step_(fd_step) {
  if (n < 1 || k_ < 1 || k_ > n) throw Error(ErrorKind::Shape, "need 1 <= k <= n fields");
}

FrameStructure FrameStructure::euclidean(int n) {
  std::vector<std::vector<Polynomial>> fields;
  for (int i = 0; i < n; ++i) {
    std::vector<Polynomial> f(n, Polynomial(n));
    f[i] = Polynomial::constant(n, 1.0);
    fields.push_back(f);
  }
  return FrameStructure(n, fields, "euclidean:" + std::to_string(n));
}

FrameStructure FrameStructure::heisenberg() {
  const Polynomial one = Polynomial::constant(3, 1.0), zero(3);
  const Polynomial x = Polynomial::variable(3, 0), y = Polynomial::variable(3, 1);
  return FrameStructure(3, {{one, zero, y * -0.5}, {zero, one, x * 0.5}}, "heisenberg");
}

FrameStructure FrameStructure::from_name(const std::string& name) {
  if (name == "heisenberg") return heisenberg();
  const std::string prefix = "euclidean:";
  if (name.rfind(prefix, 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(name.substr(prefix.size()));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Shape, "bad euclidean dimension in '" + name + "'");
    }
    if (n < 1) throw Error(ErrorKind::Shape, "euclidean dimension must be positive");
    return euclidean(n);
  }
  throw Error(ErrorKind::Shape, "unknown structure '" + name + "'");
}

Vec FrameStructure::field(int i, const Vec& x) const {
  if (x.size() != n_) throw Error(ErrorKind::Shape, "point has the wrong dimension");
  if (!poly_.empty()) {
    Vec f(n_);
    for (int c = 0; c < n_; ++c) f(c) = poly_.at(i)[c](x);
    return f;
  }
  Vec f = callables_.at(i)(x);
  if (f.size() != n_) throw Error(ErrorKind::Shape, "field returned a vector of the wrong size");
  return f;
}

FieldJet FrameStructure::field_jet(int i, const Vec& x, bool second) const {
  FieldJet j;
  j.f = field(i, x);
  j.df.resize(n_, n_);
  if (second) j.d2f.assign(n_, Mat::Zero(n_, n_));
  if (!poly_.empty()) {
    for (int c = 0; c < n_; ++c) {
      j.df.row(c) = poly_[i][c].gradient(x).transpose();
      if (second) j.d2f[c] = poly_[i][c].hessian(x);
    }
    return j;
  }
  Vec step(n_);
  for (int a = 0; a < n_; ++a) step(a) = fd_step_ * std::max(1.0, std::abs(x(a)));
  for (int a = 0; a < n_; ++a) {
    Vec xp = x, xm = x;
    xp(a) += step(a);
    xm(a) -= step(a);
    const Vec fp = field(i, xp), fm = field(i, xm);
    j.df.col(a) = (fp - fm) / (2 * step(a));
    if (!second) continue;
    // second differences need a larger step than the first
    const double ha = 1e3 * step(a);
    for (int b = 0; b <= a; ++b) {
      const double hb = 1e3 * step(b);
      Vec pp = x, pm = x, mp = x, mm = x;
      pp(a) += ha, pp(b) += hb;
      pm(a) += ha, pm(b) -= hb;
      mp(a) -= ha, mp(b) += hb;
      mm(a) -= ha, mm(b) -= hb;
      const Vec d = (field(i, pp) - field(i, pm) - field(i, mp) + field(i, mm)) / (4 * ha * hb);
      for (int c = 0; c < n_; ++c) j.d2f[c](a, b) = j.d2f[c](b, a) = d(c);
    }
  }
  return j;
}

Mat FrameStructure::frame(const Vec& x) const {
  Mat m(n_, k_);
  for (int i = 0; i < k_; ++i) m.col(i) = field(i, x);
  return m;
}

int FrameStructure::rank_at(const Vec& x) const { return numerical_rank(frame(x)); }

double FrameStructure::jacobian_mismatch(const Vec& x) const {
  double worst = 0.0;
  const double h = 1e-6;
  for (int i = 0; i < k_; ++i) {
    const FieldJet j = field_jet(i, x, false);
    for (int a = 0; a < n_; ++a) {
      Vec xp = x, xm = x;
      xp(a) += h;
      xm(a) -= h;
      const Vec fd = (field(i, xp) - field(i, xm)) / (2 * h);
      worst = std::max(worst, (fd - j.df.col(a)).norm() / std::max(1.0, fd.norm()));
    }
  }
  return worst;
}

double hamiltonian(const FrameStructure& s, const CotangentState& st) {
  double h = 0.0;
  for (int i = 0; i < s.k(); ++i) {
    const double u = st.p.dot(s.field(i, st.x));
    h += 0.5 * u * u;
  }
  return h;
}

Vec hamiltonian_vector(const FrameStructure& s, const CotangentState& st) {
  const Derivs d = rhs(s, st.x, st.p, nullptr);
  Vec out(2 * s.n());
  out << d.dx, d.dp;
  return out;
}

Geodesic geodesic_flow(const FrameStructure& s, const CotangentState& start, double T, int steps) {
  if (!(T > 0) || steps < 1) throw Error(ErrorKind::Shape, "need T > 0 and at least one step");
  if (start.x.size() != s.n() || start.p.size() != s.n())
    throw Error(ErrorKind::Shape, "state has the wrong dimension");
  Geodesic g;
  Vec x = start.x, p = start.p;
  const double h = T / steps;
  g.times.push_back(0.0);
  g.states.push_back(start);
  for (int i = 1; i <= steps; ++i) {
    rk4_step(s, x, p, nullptr, h);
    g.times.push_back(i * h);
    g.states.push_back({x, p});
  }
  return g;
}

Vec exponential(const FrameStructure& s, const Vec& x0, const Vec& p0, double t, int steps_per_unit) {
  if (t == 0.0) return x0;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * steps_per_unit)));
  Vec x = x0, p = p0;
  for (int i = 0; i < steps; ++i) rk4_step(s, x, p, nullptr, t / steps);
  return x;
}

Mat control_from_covector(const FrameStructure& s, const Geodesic& g) {
  Mat u(static_cast<Eigen::Index>(g.states.size()), s.k());
  for (std::size_t j = 0; j < g.states.size(); ++j)
    for (int i = 0; i < s.k(); ++i) u(j, i) = g.states[j].p.dot(s.field(i, g.states[j].x));
  return u;
}

std::vector<Vec> integrate_control(const FrameStructure& s, const Vec& x0, const std::vector<double>& times,
                                   const Mat& controls) {
  const auto count = static_cast<Eigen::Index>(times.size());
  if (controls.rows() != count || controls.cols() != s.k())
    throw Error(ErrorKind::Shape, "one control row per time sample is required");
  // Cubic through the four samples around [t_j, t_{j+1}], evaluated at the midpoint.
  auto midpoint = [&](Eigen::Index j) -> Vec {
    if (count < 4) return 0.5 * (controls.row(j) + controls.row(j + 1)).transpose();
    const Eigen::Index b = std::clamp<Eigen::Index>(j - 1, 0, count - 4);
    const double t = 0.5 * (times[j] + times[j + 1]);
    Vec u = Vec::Zero(s.k());
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      for (int c = 0; c < 4; ++c)
        if (c != a) w *= (t - times[b + c]) / (times[b + a] - times[b + c]);
      u += w * controls.row(b + a).transpose();
    }
    return u;
  };
  std::vector<Vec> xs{x0};
  Vec x = x0;
  for (Eigen::Index j = 0; j + 1 < count; ++j) {
    control_step(s, x, controls.row(j).transpose(), midpoint(j), controls.row(j + 1).transpose(),
                 times[j + 1] - times[j]);
    xs.push_back(x);
  }
  return xs;
}

JacobiSystem::JacobiSystem(FrameStructure s, CotangentState start, double T, int steps_per_unit)
    : s_(std::make_shared<const FrameStructure>(std::move(s))) {
  if (!(T > 0)) throw Error(ErrorKind::Shape, "need T > 0");
  const int n = s_->n();
  if (start.x.size() != n || start.p.size() != n) throw Error(ErrorKind::Shape, "state has the wrong dimension");
  const int steps = std::max(1, static_cast<int>(std::ceil(T * steps_per_unit)));
  h_ = T / steps;
  Vec x = start.x, p = start.p;
  Mat v = Mat::Zero(2 * n, n);
  v.bottomRows(n).setIdentity();
  const Mat jm = symplectic_J(n);
  geo_.times.push_back(0.0);
  geo_.states.push_back(start);
  frames_.push_back(v);
  for (int i = 1; i <= steps; ++i) {
    rk4_step(*s_, x, p, &v, h_);
    geo_.times.push_back(i == steps ? T : i * h_);
    geo_.states.push_back({x, p});
    frames_.push_back(v);
    const double r = (v.transpose() * jm * v).cwiseAbs().maxCoeff() / std::max(1.0, v.squaredNorm());
    residual_ = std::max(residual_, r);
  }
  if (residual_ > 1e-5)
    throw Error(ErrorKind::Integration, "Jacobi frame lost the Lagrangian property; reduce the step");
}

std::pair<CotangentState, Mat> JacobiSystem::at(double t) const {
  if (t < 0 || t > T() + 1e-12) throw Error(ErrorKind::Shape, "time outside [0, T]");
  const auto last = static_cast<long>(frames_.size()) - 1;
  const long i = std::clamp(static_cast<long>(std::floor(t / h_)), 0L, last);
  Vec x = geo_.states[i].x, p = geo_.states[i].p;
  Mat v = frames_[i];
  const double dt = t - geo_.times[i];
  if (dt > 0) rk4_step(*s_, x, p, &v, dt);
  return {{x, p}, v};
}

double JacobiSystem::jacobi_determinant(double t) const {
  const Mat v = at(t).second;
  return v.topRows(s_->n()).determinant();
}

std::vector<ConjugateTime> conjugate_times(const JacobiSystem& jac) {
  const int n = jac.structure().n();
  const auto& frames = jac.frames();
  const auto& times = jac.geodesic().times;
  std::vector<ConjugateTime> out;
  std::vector<double> det(frames.size()), rel(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Mat x = frames[i].topRows(n);
    det[i] = x.determinant();
    const Vec sv = singular_values(x);
    rel[i] = sv(0) > 0 ? sv(n - 1) / sv(0) : 0.0;
  }
  const std::size_t first = std::min<std::size_t>(kSkipSteps, frames.size() - 1);
  auto corank_at = [&](double t) {
    const Vec sv = singular_values(jac.at(t).second.topRows(n));
    int c = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) <= kCorankTol * sv(0)) ++c;
    return c;
  };
  for (std::size_t i = first; i + 1 < frames.size(); ++i) {
    if ((det[i] > 0) != (det[i + 1] > 0)) {
      double lo = times[i], hi = times[i + 1];
      const bool lo_pos = det[i] > 0;
      while (hi - lo > 1e-8 * std::max(hi, 1e-300) && hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if ((jac.jacobi_determinant(mid) > 0) == lo_pos)
          lo = mid;
        else
          hi = mid;
      }
      const double t = 0.5 * (lo + hi);
      out.push_back({t, std::max(1, corank_at(t)), false});
    } else if (i > first && (det[i - 1] > 0) == (det[i] > 0) && rel[i] < rel[i - 1] && rel[i] < rel[i + 1] && rel[i] < 1e-3) {
      // local minimum of the smallest singular value without a sign change
      double a = times[i - 1], b = times[i + 1];
      const double g = 0.5 * (std::sqrt(5.0) - 1);
      auto f = [&](double t) {
        const Vec sv = singular_values(jac.at(t).second.topRows(n));
        return sv(n - 1) / sv(0);
      };
      for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (f(c) < f(d))
          b = d;
        else
          a = c;
      }
      const double t = 0.5 * (a + b);
      const int c = corank_at(t);
      if (c > 0) out.push_back({t, c, true});
    }
  }
  return out;
}

std::vector<ConjugateTime> conjugate_times(const FrameStructure& s, const Vec& x0, const Vec& p0, double T) {
  return conjugate_times(JacobiSystem(s, {x0, p0}, T));
}

int maslov_count(const JacobiSystem& jac) {
  const int n = jac.structure().n();
  const auto& times = jac.geodesic().times;
  // The path starts where the frame is clearly off the vertical again.
  std::size_t first = std::min<std::size_t>(kSkipSteps, times.size() - 1);
  while (first + 1 < times.size() &&
         transversality_margin(LagrangianFrame::unchecked(jac.frames()[first]), delta_frame(n)) < 1e-5)
    ++first;
  std::vector<double> params;
  std::vector<LagrangianFrame> frames;
  for (std::size_t i = first; i < times.size(); i += 4) {
    params.push_back(times[i]);
    frames.push_back(LagrangianFrame::unchecked(LagrangianFrame::unchecked(jac.frames()[i]).orthonormal()));
  }
  if (params.back() != times.back()) {
    params.push_back(times.back());
    frames.push_back(LagrangianFrame::unchecked(LagrangianFrame::unchecked(jac.frames().back()).orthonormal()));
  }
  if (params.size() < 2) return 0;
  const LagrangianLoop path(params, frames, false, [&jac](double t) {
    return LagrangianFrame::unchecked(LagrangianFrame::unchecked(jac.at(t).second).orthonormal());
  });
  try {
    int total = 0;
    for (const auto& c : find_crossings(path, delta_frame(n))) total += c.sign * c.multiplicity;
    return -total;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonGeneric || e.kind() == ErrorKind::TangentialCrossing)
      throw Error(ErrorKind::NonGeneric,
                  std::string(e.what()) + "; perturb the initial covector or the final time");
    throw;
  }
}

EndpointMap discretized_endpoint(const FrameStructure& s, const Vec& x0, const Mat& u, int substeps) {
  if (u.cols() != s.k() || u.rows() < 1) throw Error(ErrorKind::Shape, "control must be m x k");
  if (u.size() > 64) throw Error(ErrorKind::Shape, "at most 64 control parameters");
  if (substeps <= 0) substeps = default_substeps(u.rows());
  EndpointMap out;
  out.x = endpoint(s, x0, u, substeps);
  const Vec w = flatten(u);
  out.differential.resize(s.n(), w.size());
  for (Eigen::Index a = 0; a < w.size(); ++a) {
    const double h = 1e-7 * std::max(1.0, std::abs(w(a)));
    Vec wp = w;
    wp(a) += h;
    out.differential.col(a) = (endpoint(s, x0, unflatten(wp, u.rows(), u.cols()), substeps) - out.x) / h;
  }
  return out;
}

Mat rescaled_control(const FrameStructure& s, const Vec& x0, const Vec& p0, double time, int m) {
  if (m < 1) throw Error(ErrorKind::Shape, "need at least one segment");
  int per = std::max(8, static_cast<int>(std::ceil(kStepsPerUnit * std::abs(time) / m)));
  per += per % 2;
  Mat u = Mat::Zero(m, s.k());
  if (time == 0.0) return u;
  const Geodesic g = geodesic_flow(s, {x0, p0}, time, m * per);
  const Mat c = control_from_covector(s, g);
  // Simpson average of s u(s tau) over each segment
  for (int j = 0; j < m; ++j) {
    Vec acc = Vec::Zero(s.k());
    for (int q = 0; q <= per; ++q) {
      const double w = (q == 0 || q == per) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      acc += w * c.row(j * per + q).transpose();
    }
    u.row(j) = (time * acc / (3.0 * per)).transpose();
  }
  return u;
}

double restricted_hessian_min_eig(const FrameStructure& s, const Vec& x0, const Vec& p0, double time, int m) {
  const int n = s.n(), k = s.k();
  if (m * k > 64) throw Error(ErrorKind::Shape, "at most 64 control parameters");
  const Mat u = rescaled_control(s, x0, p0, time, m);
  const Vec w = flatten(u);
  const int d = static_cast<int>(w.size());
  const int sub = default_substeps(m);
  auto F = [&](const Vec& ww) { return endpoint(s, x0, unflatten(ww, m, k), sub); };

  Mat df(n, d);
  const double h1 = 1e-6;
  for (int a = 0; a < d; ++a) {
    Vec wp = w, wm = w;
    wp(a) += h1;
    wm(a) -= h1;
    df.col(a) = (F(wp) - F(wm)) / (2 * h1);
  }
  const Eigen::JacobiSVD<Mat> svd(df, Eigen::ComputeFullV);
  const int rank = numerical_rank(df, 1e-8);
  if (rank < std::min(n, d) || d - rank < 1)
    throw Error(ErrorKind::Inconclusive, "kernel of the end-point differential is unstable; increase m");
  const Mat kernel = svd.matrixV().rightCols(d - rank);
  // multiplier from dJ = lambda . DF with J = |u|^2 / (2m)
  const Vec lambda = df.transpose().completeOrthogonalDecomposition().solve(w / m);

  const double h2 = 1e-3;
  auto G = [&](const Vec& ww) { return lambda.dot(F(ww)); };
  Mat hess(d, d);
  const double g0 = G(w);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b <= a; ++b) {
      double val;
      if (a == b) {
        Vec wp = w, wm = w;
        wp(a) += h2;
        wm(a) -= h2;
        val = (G(wp) - 2 * g0 + G(wm)) / (h2 * h2);
      } else {
        Vec pp = w, pm = w, mp = w, mm = w;
        pp(a) += h2, pp(b) += h2;
        pm(a) += h2, pm(b) -= h2;
        mp(a) -= h2, mp(b) += h2;
        mm(a) -= h2, mm(b) -= h2;
        val = (G(pp) - G(pm) - G(mp) + G(mm)) / (4 * h2 * h2);
      }
      hess(a, b) = hess(b, a) = val;
    }
  }
  const Mat restricted = Mat::Identity(d - rank, d - rank) - m * kernel.transpose() * hess * kernel;
  return Eigen::SelfAdjointEigenSolver<Mat>(symmetrize(restricted), Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace maslovkit
