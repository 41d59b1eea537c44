#include "maslovkit/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maslovkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNearTrain = 1e-7;

// Lagrangian planes transversal to delta: rotations of delta by e^{i phi},
// phi in (0, pi), inside the unitary frame (Q; -JQ) adapted to delta.
struct VerticalFamily {
  LagrangianFrame delta;
  std::vector<LagrangianFrame> verticals;
  std::vector<Splitting> splittings;

  explicit VerticalFamily(const LagrangianFrame& d) : delta(LagrangianFrame::unchecked(d.orthonormal())) {
    const int n = d.n();
    const Mat q = delta.columns();
    const Mat w = -symplectic_J(n) * q;
    const int count = 2 * n + 3;
    for (int m = 0; m < count; ++m) {
      const double phi = kPi * (m + 0.5) / count;
      verticals.push_back(LagrangianFrame::unchecked(std::cos(phi) * q + std::sin(phi) * w));
      splittings.emplace_back(delta, verticals.back());
    }
  }

  std::size_t best_for(const std::vector<LagrangianFrame>& planes) const {
    std::size_t best = 0;
    double best_margin = -1.0;
    for (std::size_t m = 0; m < verticals.size(); ++m) {
      double margin = 1e300;
      for (const auto& p : planes) margin = std::min(margin, transversality_margin(p, verticals[m]));
      if (margin > best_margin) {
        best_margin = margin;
        best = m;
      }
    }
    return best;
  }
};

int negative_count(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(s, Eigen::EigenvaluesOnly);
  return static_cast<int>((eig.eigenvalues().array() < 0.0).count());
}

Mat chart_or_throw(const LagrangianFrame& f, const Splitting& split) {
  try {
    return chart_from_frame(f, split).S();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotInChart)
      throw Error(ErrorKind::UndersampledLoop, "chart lost inside a sample interval");
    throw;
  }
}

struct CrossingFormValue {
  double value;
  double scale;
};

CrossingFormValue crossing_form_value(const LagrangianLoop& loop, double t,
                                      const LagrangianFrame& delta, double h) {
  const VerticalFamily family(delta);
  const LagrangianFrame here = loop.at(t);
  const Splitting& split = family.splittings[family.best_for({here})];
  const Mat s0 = chart_or_throw(here, split);
  Mat sdot;
  if (loop.closed() || (t - h >= loop.t_begin() && t + h <= loop.t_end())) {
    sdot = (chart_or_throw(loop.at(t + h), split) - chart_or_throw(loop.at(t - h), split)) / (2 * h);
  } else if (t - h < loop.t_begin()) {
    sdot = (chart_or_throw(loop.at(t + h), split) - s0) / h;
  } else {
    sdot = (s0 - chart_or_throw(loop.at(t - h), split)) / h;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(s0);
  Eigen::Index k = 0;
  eig.eigenvalues().cwiseAbs().minCoeff(&k);
  const Vec v = eig.eigenvectors().col(k);
  return {v.dot(sdot * v), std::max(1.0, sdot.norm())};
}

}  // namespace

LagrangianLoop::LagrangianLoop(std::vector<double> params, std::vector<LagrangianFrame> frames,
                               bool closed, FramePath path)
    : params_(std::move(params)), frames_(std::move(frames)), closed_(closed), path_(std::move(path)) {
  if (params_.size() != frames_.size() || params_.size() < 2)
    throw Error(ErrorKind::Shape, "a loop needs at least two samples with matching parameters");
  for (std::size_t i = 1; i < params_.size(); ++i) {
    if (!(params_[i] > params_[i - 1])) throw Error(ErrorKind::Shape, "loop parameters must increase");
    if (frames_[i].n() != frames_[0].n()) throw Error(ErrorKind::Shape, "loop samples differ in n");
  }
  if (closed_ && intersection_dimension(frames_.front(), frames_.back(), 1e-6) != n())
    throw Error(ErrorKind::Invariant, "closed loop: first and last planes differ");
}

LagrangianLoop LagrangianLoop::from_path(FramePath path, int samples, bool closed, double t0,
                                         double t1) {
  if (samples < 2) throw Error(ErrorKind::Shape, "need at least two samples");
  std::vector<double> params(samples);
  std::vector<LagrangianFrame> frames;
  frames.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    params[i] = (i == samples - 1) ? t1 : t0 + (t1 - t0) * i / (samples - 1);
    frames.push_back(path(params[i]));
  }
  return LagrangianLoop(std::move(params), std::move(frames), closed, std::move(path));
}

double LagrangianLoop::wrap(double t) const {
  const double a = t_begin(), b = t_end();
  if (!closed_) return std::clamp(t, a, b);
  const double period = b - a;
  double w = a + std::fmod(t - a, period);
  if (w < a) w += period;
  if (w >= b) w -= period;
  return w;
}

LagrangianFrame LagrangianLoop::at(double t) const {
  if (!closed_ && (t < t_begin() || t > t_end()) && path_) return path_(t);
  const double w = wrap(t);
  if (path_) return path_(w);
  auto it = std::upper_bound(params_.begin(), params_.end(), w);
  std::size_t i = (it == params_.begin()) ? 0 : static_cast<std::size_t>(it - params_.begin()) - 1;
  if (i + 1 >= params_.size()) return frames_.back();
  if (w == params_[i]) return frames_[i];
  const double s = (w - params_[i]) / (params_[i + 1] - params_[i]);
  const int nn = n();
  std::size_t best = 0;
  double best_margin = -1.0;
  std::vector<LagrangianFrame> verticals;
  for (int m = 0; m < 2 * nn + 3; ++m) {
    verticals.push_back(rotated_pi(nn, kPi * (m + 0.5) / (2 * nn + 3)));
    const double margin = std::min(transversality_margin(frames_[i], verticals.back()),
                                   transversality_margin(frames_[i + 1], verticals.back()));
    if (margin > best_margin) {
      best_margin = margin;
      best = verticals.size() - 1;
    }
  }
  const double phi = kPi * (best + 0.5) / (2 * nn + 3);
  const Splitting split(rotated_pi(nn, phi + kPi / 2), verticals[best]);
  const Mat s0 = chart_from_frame(frames_[i], split).S();
  const Mat s1 = chart_from_frame(frames_[i + 1], split).S();
  return frame_from_chart(SymmetricChart((1 - s) * s0 + s * s1), split);
}

LagrangianLoop LagrangianLoop::reversed() const {
  const double a = t_begin(), b = t_end();
  std::vector<double> params(params_.size());
  std::vector<LagrangianFrame> frames(frames_.rbegin(), frames_.rend());
  for (std::size_t i = 0; i < params_.size(); ++i) params[i] = a + b - params_[params_.size() - 1 - i];
  FramePath path;
  if (path_) path = [p = path_, a, b](double t) { return p(a + b - t); };
  return LagrangianLoop(std::move(params), std::move(frames), closed_, std::move(path));
}

LagrangianLoop LagrangianLoop::refined(const std::vector<bool>& split) const {
  if (!split.empty() && split.size() != params_.size() - 1)
    throw Error(ErrorKind::Shape, "refinement flags must match the interval count");
  std::vector<double> params;
  std::vector<LagrangianFrame> frames;
  for (std::size_t i = 0; i + 1 < params_.size(); ++i) {
    params.push_back(params_[i]);
    frames.push_back(frames_[i]);
    if (split.empty() || split[i]) {
      const double mid = 0.5 * (params_[i] + params_[i + 1]);
      params.push_back(mid);
      frames.push_back(at(mid));
    }
  }
  params.push_back(params_.back());
  frames.push_back(frames_.back());
  if (params.size() > kMaxLoopSamples)
    throw Error(ErrorKind::UndersampledLoop, "refinement exceeded the sample cap");
  return LagrangianLoop(std::move(params), std::move(frames), closed_, path_);
}

double max_principal_angle(const LagrangianFrame& a, const LagrangianFrame& b) {
  const Vec c = singular_values(a.orthonormal().transpose() * b.orthonormal());
  return std::acos(std::clamp(c.minCoeff(), -1.0, 1.0));
}

LagrangianLoop resolve(const LagrangianLoop& loop, double max_angle) {
  LagrangianLoop current = loop;
  for (;;) {
    std::vector<bool> split(current.size() - 1, false);
    bool any = false;
    for (std::size_t i = 0; i + 1 < current.size(); ++i) {
      if (max_principal_angle(current.frames()[i], current.frames()[i + 1]) >= max_angle) {
        split[i] = true;
        any = true;
      }
    }
    if (!any) return current;
    current = current.refined(split);
  }
}

LagrangianLoop concatenate(const LagrangianLoop& a, const LagrangianLoop& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::Shape, "loops differ in n");
  const int n = a.n();
  if (intersection_dimension(a.frames().front(), b.frames().front(), 1e-6) != n ||
      intersection_dimension(a.frames().back(), b.frames().front(), 1e-6) != n)
    throw Error(ErrorKind::Invariant, "loops do not share a base point");
  const double a0 = a.t_begin(), a1 = a.t_end(), b0 = b.t_begin(), b1 = b.t_end();
  std::vector<double> params;
  std::vector<LagrangianFrame> frames;
  for (std::size_t i = 0; i < a.size(); ++i) {
    params.push_back(0.5 * (a.params()[i] - a0) / (a1 - a0));
    frames.push_back(a.frames()[i]);
  }
  for (std::size_t i = 1; i < b.size(); ++i) {
    params.push_back(0.5 + 0.5 * (b.params()[i] - b0) / (b1 - b0));
    frames.push_back(b.frames()[i]);
  }
  FramePath path;
  if (a.has_path() && b.has_path()) {
    path = [a, b, a0, a1, b0, b1](double t) {
      return t <= 0.5 ? a.at(a0 + 2 * t * (a1 - a0)) : b.at(b0 + (2 * t - 1) * (b1 - b0));
    };
  }
  return LagrangianLoop(std::move(params), std::move(frames), a.closed() && b.closed(),
                        std::move(path));
}

Eigen::MatrixXcd unitary_representative(const LagrangianFrame& frame) {
  if (!is_lagrangian(frame.columns()))
    throw Error(ErrorKind::Invariant, "frame is not Lagrangian");
  const int n = frame.n();
  const Mat q = frame.orthonormal();
  Eigen::MatrixXcd u(n, n);
  u.real() = q.topRows(n);
  u.imag() = q.bottomRows(n);
  return u;
}

std::complex<double> det_squared(const LagrangianFrame& frame) {
  const std::complex<double> d = unitary_representative(frame).determinant();
  return d * d;
}

double winding_phase(const LagrangianLoop& loop, WindingOptions options) {
  LagrangianLoop current = resolve(loop, kPi / 8);
  for (;;) {
    std::vector<std::complex<double>> d;
    d.reserve(current.size());
    for (const auto& f : current.frames()) d.push_back(det_squared(f));
    std::vector<bool> split(current.size() - 1, false);
    bool any = false;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      const double inc = std::arg(d[i + 1] / d[i]);
      if (std::abs(inc) >= kPi / 2) {
        split[i] = true;
        any = true;
      }
      total += inc;
    }
    if (!any) return total / (2 * kPi);
    if (!options.refine)
      throw Error(ErrorKind::UndersampledLoop, "det^2 phase increment of at least pi/2");
    current = current.refined(split);
  }
}

int maslov_index_winding(const LagrangianLoop& loop, WindingOptions options) {
  if (!loop.closed()) throw Error(ErrorKind::Invariant, "winding index needs a closed loop");
  const double phase = winding_phase(loop, options);
  const double rounded = std::round(phase);
  if (std::abs(phase - rounded) >= 0.1)
    throw Error(ErrorKind::Invariant, "winding residual too large: " + std::to_string(phase));
  return static_cast<int>(rounded);
}

double restricted_crossing_form(const LagrangianLoop& loop, double t, const LagrangianFrame& delta,
                                double h) {
  return crossing_form_value(loop, t, delta, h).value;
}

int crossing_sign(const LagrangianLoop& loop, const Crossing& crossing, const LagrangianFrame& delta,
                  CrossingOptions options) {
  if (crossing.multiplicity != 1)
    throw Error(ErrorKind::NonGeneric, "crossing sign needs multiplicity one");
  const auto form = crossing_form_value(loop, crossing.t, delta, options.h);
  if (std::abs(form.value) <= options.form_tol * form.scale)
    throw Error(ErrorKind::TangentialCrossing,
                "restricted tangent form vanishes at t = " + std::to_string(crossing.t));
  return form.value > 0 ? 1 : -1;
}

std::vector<Crossing> find_crossings(const LagrangianLoop& input, const LagrangianFrame& delta,
                                     CrossingOptions options) {
  if (input.n() != delta.n()) throw Error(ErrorKind::Shape, "delta lives in a different space");
  const LagrangianLoop loop = resolve(input, kPi / 8);
  const VerticalFamily family(delta);
  const std::size_t count = loop.size();

  std::vector<double> grid = loop.params();
  std::vector<double> margin(count);
  for (std::size_t i = 0; i < count; ++i) margin[i] = transversality_margin(loop.frames()[i], delta);
  if (*std::max_element(margin.begin(), margin.end()) < kNearTrain)
    throw Error(ErrorKind::NonGeneric, "loop lies inside the train");

  // Move grid points off the train so that the inertia at each grid point is unambiguous.
  const double period = loop.t_end() - loop.t_begin();
  for (std::size_t i = 0; i < count; ++i) {
    if (loop.closed() && i == count - 1) {
      grid[i] = grid[0] + period;
      break;
    }
    if (margin[i] >= kNearTrain) continue;
    if (!loop.closed() && (i == 0 || i == count - 1))
      throw Error(ErrorKind::NonGeneric, "loop endpoint lies on the train");
    bool moved = false;
    for (double frac : {0.25, 0.125, 0.375}) {
      const double cand = grid[i] + frac * (grid[i + 1] - grid[i]);
      if (transversality_margin(loop.at(cand), delta) >= kNearTrain) {
        grid[i] = cand;
        moved = true;
        break;
      }
    }
    if (!moved) throw Error(ErrorKind::NonGeneric, "loop stays on the train near a sample");
  }

  std::vector<Crossing> out;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double a = grid[i], b = grid[i + 1];
    const LagrangianFrame fa = loop.at(a), fb = loop.at(b), fm = loop.at(0.5 * (a + b));
    const Splitting& split = family.splittings[family.best_for({fa, fm, fb})];
    auto inertia = [&](double t) { return negative_count(chart_or_throw(loop.at(t), split)); };
    auto locate = [&](auto&& self, double lo, double hi, int ilo, int ihi) -> void {
      if (ilo == ihi) return;
      if (hi - lo <= options.t_tol) {
        const double t = loop.wrap(0.5 * (lo + hi));
        Crossing c{t, intersection_dimension(loop.at(t), delta, 1e-6), 0};
        if (std::abs(ilo - ihi) >= 2 || c.multiplicity >= 2)
          throw Error(ErrorKind::NonGeneric,
                      "crossing of multiplicity >= 2 at t = " + std::to_string(t));
        c.multiplicity = 1;
        c.sign = crossing_sign(loop, c, delta, options);
        if (c.sign != ilo - ihi)
          throw Error(ErrorKind::NonGeneric, "tangent form and inertia jump disagree at t = " +
                                                 std::to_string(t));
        out.push_back(c);
        return;
      }
      const double mid = 0.5 * (lo + hi);
      const int imid = inertia(mid);
      self(self, lo, mid, ilo, imid);
      self(self, mid, hi, imid, ihi);
    };
    locate(locate, a, b, inertia(a), inertia(b));
  }
  std::sort(out.begin(), out.end(), [](const Crossing& x, const Crossing& y) { return x.t < y.t; });
  return out;
}

int maslov_index_crossings(const LagrangianLoop& loop, const LagrangianFrame& delta,
                           CrossingOptions options) {
  int total = 0;
  for (const auto& c : find_crossings(loop, delta, options)) total += c.sign;
  return total;
}

CrossingBound crossing_count_bound(const LagrangianLoop& loop, const LagrangianFrame& delta,
                                   CrossingOptions options) {
  const auto crossings = find_crossings(loop, delta, options);
  int index = 0;
  for (const auto& c : crossings) index += c.sign;
  return {std::abs(index), static_cast<int>(crossings.size())};
}

PlaneCurve circle_curve(double radius) { return ellipse_curve(radius, radius); }

PlaneCurve ellipse_curve(double a, double b) {
  return {[a, b](double t) {
            const double s = 2 * kPi * t;
            return Eigen::Vector2d(a * std::cos(s), b * std::sin(s));
          },
          [a, b](double t) {
            const double s = 2 * kPi * t;
            return Eigen::Vector2d(-2 * kPi * a * std::sin(s), 2 * kPi * b * std::cos(s));
          }};
}

PlaneCurve figure_eight_curve() {
  return {[](double t) {
            const double s = 2 * kPi * t;
            return Eigen::Vector2d(std::cos(s), std::sin(s) * std::cos(s));
          },
          [](double t) {
            const double s = 2 * kPi * t;
            return Eigen::Vector2d(-2 * kPi * std::sin(s), 2 * kPi * std::cos(2 * s));
          }};
}

namespace {

LagrangianFrame line_frame(const Eigen::Vector2d& tangent) {
  if (!(tangent.norm() > 1e-12)) throw Error(ErrorKind::NotImmersion, "tangent vector vanishes");
  Mat c(2, 1);
  c << tangent(0), tangent(1);
  return LagrangianFrame::unchecked(std::move(c));
}

}  // namespace

LagrangianLoop gauss_loop_from_plane_curve(const PlaneCurve& curve, int samples) {
  auto tangent = curve.tangent;
  return LagrangianLoop::from_path([tangent](double t) { return line_frame(tangent(t)); }, samples,
                                   true);
}

LagrangianLoop gauss_loop_from_plane_curve(const std::vector<double>& params,
                                           const std::vector<Eigen::Vector2d>& tangents) {
  if (params.size() != tangents.size()) throw Error(ErrorKind::Shape, "params and tangents differ");
  std::vector<LagrangianFrame> frames;
  for (const auto& v : tangents) frames.push_back(line_frame(v));
  return LagrangianLoop(params, std::move(frames), true);
}

LagrangianLoop rotation_loop(int n, int samples) {
  return LagrangianLoop::from_path([n](double t) { return rotated_pi(n, kPi * t); }, samples, true);
}

Mat random_symplectic(int n, double eps, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat h(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = g(rng);
  h = symmetrize(h);
  h /= h.norm();
  return cayley_symplectic(eps * h);
}

std::pair<LagrangianLoop, int> random_closed_loop(int n, std::mt19937_64& rng, int max_turns,
                                                  int samples) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> turns(-max_turns, max_turns);
  auto gaussian = [&](int r, int c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
  };
  const Mat q = Eigen::HouseholderQR<Mat>(gaussian(n, n)).householderQ();
  Vec k(n);
  for (int j = 0; j < n; ++j) k(j) = turns(rng);
  const Mat s0 = symmetrize(gaussian(n, n));
  const Mat c1 = 0.7 * symmetrize(gaussian(n, n));
  const Mat c2 = 0.4 * symmetrize(gaussian(n, n));
  Mat o = q * Vec(k.unaryExpr([](double kj) { return std::cos(kPi * kj); })).asDiagonal() *
          q.transpose();
  const Mat s1 = o.transpose() * s0 * o;
  auto path = [=](double t) {
    const Mat s = (1 - t) * s0 + t * s1 + std::sin(2 * kPi * t) * c1 + std::sin(4 * kPi * t) * c2;
    const Mat cs = q * Vec(k.unaryExpr([t](double kj) { return std::cos(kPi * t * kj); })).asDiagonal() *
                   q.transpose();
    const Mat sn = q * Vec(k.unaryExpr([t](double kj) { return std::sin(kPi * t * kj); })).asDiagonal() *
                   q.transpose();
    Mat u(2 * n, 2 * n);
    u << cs, -sn, sn, cs;
    Mat graph(2 * n, n);
    graph << Mat::Identity(n, n), symmetrize(s);
    return LagrangianFrame::unchecked(u * graph);
  };
  return {LagrangianLoop::from_path(path, samples, true), static_cast<int>(k.sum())};
}

}  // namespace maslovkit
