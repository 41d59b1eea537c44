#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "maslovkit/acceptance.hpp"
#include "maslovkit/errors.hpp"
#include "maslovkit/io.hpp"
#include "maslovkit/parallel.hpp"
#include "maslovkit/schubert.hpp"

using namespace maslovkit;
using io::Json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string input;
  std::string output_dir = ".";
  std::optional<double> tol;
  int mesh_level = 6;
  std::optional<int> steps;
  int trials = 100;
  std::uint64_t seed = 0;
  bool emit_curve = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--input", c.input, "input file path or inline JSON");
  sub->add_option("--output-dir", c.output_dir, "directory for reports")->capture_default_str();
  sub->add_option("--tol", c.tol, "tolerance override");
  sub->add_option("--mesh-level", c.mesh_level, "icosphere subdivision level")->capture_default_str();
  sub->add_option("--steps", c.steps, "sample or integration step count");
  sub->add_option("--trials", c.trials, "trials for randomized checks")->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_flag("--emit-curve", c.emit_curve, "write plot-ready curve data");
}

Json common_config(const std::string& subcommand, const Common& c) {
  Json j{{"subcommand", subcommand}, {"input", c.input},          {"output_dir", c.output_dir},
         {"mesh_level", c.mesh_level}, {"trials", c.trials},    {"seed", c.seed},
         {"emit_curve", c.emit_curve}, {"threads", thread_count()}};
  j["tol"] = c.tol ? Json(*c.tol) : Json(nullptr);
  j["steps"] = c.steps ? Json(*c.steps) : Json(nullptr);
  return j;
}

void validate(const Common& c) {
  if (c.tol && !(*c.tol > 0)) throw UsageError("--tol must be positive");
  if (c.steps && *c.steps < 1) throw UsageError("--steps must be positive");
  if (c.trials < 1) throw UsageError("--trials must be positive");
  if (c.mesh_level < 0 || c.mesh_level > 8) throw UsageError("--mesh-level must be in [0, 8]");
}

Json read_input(const std::string& input) {
  std::string text = input;
  if (input.empty()) throw UsageError("--input is required here");
  if (input.find_first_not_of(" \t\n") != std::string::npos && input[input.find_first_not_of(" \t\n")] != '{') {
    std::ifstream f(input);
    if (!f) throw UsageError("cannot read " + input);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
}

std::filesystem::path out_path(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.output_dir);
  return std::filesystem::path(c.output_dir) / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Vec parse_vector(const std::string& s, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + " expects comma-separated numbers");
    }
  }
  return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// maslov

struct MaslovArgs {
  std::string loop = "rotation";
  int n = 1;
  double delta_perturbation = 0.2;
};

int run_maslov(const Common& c, const MaslovArgs& a) {
  validate(c);
  if (a.n < 1) throw UsageError("--n must be positive");
  std::mt19937_64 rng(c.seed);
  std::optional<LagrangianLoop> loop;
  LagrangianFrame delta = delta_frame(1);
  std::string kind = c.input.empty() ? a.loop : "file";
  if (kind == "file") {
    loop = io::loop_from_json(read_input(c.input));
    delta = delta_frame(loop->n());
  } else if (kind == "rotation") {
    loop = rotation_loop(a.n, c.steps.value_or(64));
    // the standard Delta meets the n >= 2 rotation in a plane at t = 1/2
    delta = a.n == 1 ? delta_frame(1) : delta_frame(a.n).transformed(random_symplectic(a.n, a.delta_perturbation, rng));
  } else if (kind == "random") {
    loop = random_closed_loop(a.n, rng, 2, c.steps.value_or(128)).first;
    delta = delta_frame(a.n);
  } else if (kind == "circle" || kind == "figure-eight" || kind == "ellipse") {
    const PlaneCurve curve =
        kind == "circle" ? circle_curve() : kind == "ellipse" ? ellipse_curve(2.0, 1.0) : figure_eight_curve();
    loop = gauss_loop_from_plane_curve(curve, c.steps.value_or(256));
    delta = delta_frame(1);
  } else {
    throw UsageError("unknown --loop " + a.loop);
  }
  CrossingOptions opt;
  if (c.tol) opt.t_tol = *c.tol;
  const auto crossings = find_crossings(*loop, delta, opt);
  const int w = maslov_index_winding(*loop);
  const int x = maslov_index_crossings(*loop, delta, opt);
  const auto bound = crossing_count_bound(*loop, delta, opt);

  Json config = common_config("maslov", c);
  config["loop"] = kind;
  config["n"] = loop->n();
  config["delta_perturbation"] = a.delta_perturbation;
  config["t_tol"] = opt.t_tol;
  config["form_tol"] = opt.form_tol;
  Json report{{"config", config},
              {"n", loop->n()},
              {"index_winding", w},
              {"index_crossings", x},
              {"abs_index", bound.abs_index},
              {"crossing_count", bound.crossing_count},
              {"delta", io::frame_to_json(delta)}};
  std::string lines;
  for (const auto& cr : crossings) lines += io::to_json(cr).dump() + "\n";
  write_text(out_path(c, "crossings.jsonl"), lines);
  write_text(out_path(c, "maslov_report.json"), report.dump(2) + "\n");
  if (c.emit_curve) write_text(out_path(c, "loop.json"), io::loop_to_json(*loop).dump() + "\n");
  std::cout << Json{{"index_winding", w}, {"index_crossings", x}}.dump() << "\n";
  return 0;
}

// pencil

struct PencilArgs {
  int samples = 2000;
};

int run_pencil(const Common& c, const PencilArgs& a) {
  validate(c);
  const Pencil pencil = c.input.empty() ? example_pencil() : io::pencil_from_json(read_input(c.input));
  const SphereMesh mesh = SphereMesh::for_dimension(pencil.k(), c.mesh_level);
  const double tol = c.tol.value_or(1e-9);
  const auto s = stratify(pencil, mesh, tol);
  BaseLocusOptions bl;
  bl.samples = a.samples;
  bl.seed = c.seed + 1;
  const auto est = sample_base_locus_b0(pencil, bl);

  Json config = common_config("pencil", c);
  config["inertia_tol"] = tol;
  config["base_locus_samples"] = a.samples;
  config["base_locus_seed"] = bl.seed;
  Json ovals = Json::array();
  for (const auto& o : s.ovals)
    ovals.push_back({{"id", o.id},
                     {"sign", o.sign},
                     {"length_estimate", o.length},
                     {"vertex_count", o.vertex_count},
                     {"self_antipodal", o.self_antipodal}});
  Json report{{"config", config},
              {"pencil", io::pencil_to_json(pencil)},
              {"mesh_vertices", s.mesh.vertex_count()},
              {"zero_points", s.points.size()},
              {"ovals", ovals},
              {"duality_bound", duality_bound(s)},
              {"base_locus",
               {{"b0", est.b0},
                {"accepted", est.accepted},
                {"attempted", est.attempted},
                {"acceptance_rate", est.acceptance_rate},
                {"eps", est.eps},
                {"link_radius", est.link_radius},
                {"inconclusive", est.inconclusive},
                {"unstable", est.unstable}}}};
  write_text(out_path(c, "pencil_report.json"), report.dump(2) + "\n");

  std::string csv = "j,b0,chi\n";
  for (int j = 0; j <= pencil.n() + 1; ++j) {
    const auto w = lebesgue_set(s, j);
    csv += std::to_string(j) + "," + std::to_string(w.b0) + "," + std::to_string(w.euler) + "\n";
  }
  write_text(out_path(c, "lebesgue.csv"), csv);

  if (c.emit_curve) {
    std::vector<const ZeroPoint*> pts;
    for (const auto& p : s.points) pts.push_back(&p);
    std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->oval < b->oval; });
    std::string curve = "x,y,z,oval_id\n";
    for (const auto* p : pts) {
      const double x = p->x(0), y = p->x.size() > 1 ? p->x(1) : 0.0, z = p->x.size() > 2 ? p->x(2) : 0.0;
      curve += fmt(x) + "," + fmt(y) + "," + fmt(z) + "," + std::to_string(p->oval) + "\n";
    }
    write_text(out_path(c, "curve.csv"), curve);
  }
  std::cout << Json{{"ovals", s.ovals.size()}, {"duality_bound", duality_bound(s)}, {"b0", est.b0}}.dump() << "\n";
  return 0;
}

// morse

struct MorseArgs {
  std::string family = "cubic";
  int n = 2;
  std::vector<int> signs;
  int t_sign = -1;
  double c0 = 0.0;
  double step = 0.02;
  double s_max = 10.0;
  std::optional<double> start_t;
  std::string start_x;
};

int run_morse(const Common& c, const MorseArgs& a) {
  validate(c);
  std::optional<MorseFamily> fam;
  double t0 = 0.0;
  Vec x0;
  if (!c.input.empty()) {
    const Json j = read_input(c.input);
    fam = io::family_from_json(j);
    t0 = 0.25 * fam->box().t_min + 0.75 * fam->box().t_max;
    x0 = Vec::Zero(fam->n());
    if (j.contains("start")) {
      t0 = j["start"].value("t", t0);
      if (j["start"].contains("x")) x0 = io::vector_from_json(j["start"]["x"]);
    }
  } else if (a.family == "cubic") {
    fam = cubic_fold_family();
    t0 = 3.0;
    x0 = Vec::Ones(1);
  } else if (a.family == "quadratic") {
    fam = quadratic_family();
    x0 = Vec::Zero(1);
  } else if (a.family == "circle") {
    fam = circle_family();
    x0 = Vec::Constant(1, 0.9);
  } else if (a.family == "normal-form") {
    if (a.n < 1) throw UsageError("--n must be positive");
    if (a.t_sign != 1 && a.t_sign != -1) throw UsageError("--t-sign must be 1 or -1");
    std::vector<int> signs = a.signs.empty() ? std::vector<int>(a.n - 1, 1) : a.signs;
    if (static_cast<int>(signs.size()) != a.n - 1) throw UsageError("--signs needs n - 1 entries");
    fam = fold_normal_form(a.n, a.c0, a.t_sign, signs);
    t0 = -0.75 * a.t_sign;
    x0 = Vec::Zero(a.n);
    x0(0) = 0.5;
  } else {
    throw UsageError("unknown --family " + a.family);
  }
  if (a.start_t) t0 = *a.start_t;
  if (!a.start_x.empty()) x0 = parse_vector(a.start_x, "--start-x");
  if (x0.size() != fam->n()) throw UsageError("start point has the wrong dimension");

  ContinuationOptions opt;
  opt.step = a.step;
  opt.s_max = a.s_max;
  if (c.tol) opt.tol = *c.tol;
  if (!(opt.step > 0) || !(opt.s_max > 0)) throw UsageError("--step and --s-max must be positive");
  const auto seed = seed_point(*fam, t0, x0);
  const auto curve = continue_curve(*fam, seed, opt);
  const auto folds = detect_folds(curve, *fam);
  const auto prof = index_profile(curve, *fam, folds);

  Json config = common_config("morse", c);
  config["family"] = c.input.empty() ? a.family : "file";
  config["step"] = opt.step;
  config["s_max"] = opt.s_max;
  config["newton_tol"] = opt.tol;
  config["start"] = {{"t", t0}, {"x", io::to_json(x0)}};
  if (a.family == "normal-form" && c.input.empty())
    config["normal_form"] = {{"n", a.n}, {"c0", a.c0}, {"t_sign", a.t_sign}, {"signs", a.signs}};
  Json fj = Json::array();
  for (std::size_t i = 0; i < folds.size(); ++i)
    fj.push_back({{"s", folds[i].s},
                  {"t", folds[i].t},
                  {"lambda", folds[i].lambda},
                  {"x", io::to_json(folds[i].x)},
                  {"tangential", folds[i].tangential},
                  {"index_before", prof.jumps[i].before},
                  {"index_after", prof.jumps[i].after}});
  Json report{{"config", config},
              {"family", io::family_to_json(*fam)},
              {"points", curve.points.size()},
              {"closed", curve.closed},
              {"left_box_backward", curve.left_box_backward},
              {"left_box_forward", curve.left_box_forward},
              {"folds", fj}};
  write_text(out_path(c, "morse_report.json"), report.dump(2) + "\n");

  std::string csv = "s,t,lambda";
  for (int i = 0; i < fam->n(); ++i) csv += ",x" + std::to_string(i + 1);
  csv += ",index,is_fold\n";
  auto row = [&](double s, double t, double l, const Vec& x, int index, int is_fold) {
    csv += fmt(s) + "," + fmt(t) + "," + fmt(l);
    for (Eigen::Index i = 0; i < x.size(); ++i) csv += "," + fmt(x(i));
    csv += "," + std::to_string(index) + "," + std::to_string(is_fold) + "\n";
  };
  std::size_t next_fold = 0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    row(p.s, p.t, p.lambda, p.x, prof.index[i], 0);
    while (next_fold < folds.size() && folds[next_fold].segment == static_cast<int>(i)) {
      const auto& f = folds[next_fold];
      row(f.s, f.t, f.lambda, f.x, std::min(prof.jumps[next_fold].before, prof.jumps[next_fold].after), 1);
      ++next_fold;
    }
  }
  write_text(out_path(c, "curve.csv"), csv);
  Json summary{{"folds", folds.size()}, {"points", curve.points.size()}};
  std::cout << summary.dump() << "\n";
  return 0;
}

// geodesic

struct GeodesicArgs {
  std::string structure = "heisenberg";
  std::string x0;
  std::string p0;
  double T = 0.0;
  int sweep = 0;
};

int run_geodesic(const Common& c, const GeodesicArgs& a) {
  validate(c);
  const FrameStructure s =
      c.input.empty() ? FrameStructure::from_name(a.structure) : io::structure_from_json(read_input(c.input));
  const int n = s.n();
  const Vec x0 = a.x0.empty() ? Vec::Zero(n) : parse_vector(a.x0, "--x0");
  Vec p0 = Vec::Zero(n);
  if (a.p0.empty()) {
    p0(0) = 1.0;
    if (n == 3 && s.name() == "heisenberg") p0(2) = 2 * std::numbers::pi;
  } else {
    p0 = parse_vector(a.p0, "--p0");
  }
  if (x0.size() != n || p0.size() != n) throw UsageError("--x0 and --p0 need n entries");
  if (!(a.T > 0)) throw UsageError("--T must be positive");
  if (a.sweep < 0) throw UsageError("--sweep must be nonnegative");
  const int spu = c.steps.value_or(kStepsPerUnit);

  const JacobiSystem j(s, {x0, p0}, a.T, spu);
  const auto ct = conjugate_times(j);
  const int mc = maslov_count(j);

  Json config = common_config("geodesic", c);
  config["structure"] = io::structure_to_json(s);
  config["x0"] = io::to_json(x0);
  config["p0"] = io::to_json(p0);
  config["T"] = a.T;
  config["steps_per_unit"] = spu;
  config["sweep"] = a.sweep;
  Json cj = Json::array();
  for (const auto& t : ct)
    cj.push_back({{"t", t.t},
                  {"multiplicity", t.multiplicity},
                  {"tangential", t.tangential},
                  {"x", io::to_json(j.at(t.t).first.x)}});
  Json report{{"config", config},
              {"hamiltonian", hamiltonian(s, {x0, p0})},
              {"symplectic_residual", j.symplectic_residual()},
              {"conjugate_times", cj},
              {"maslov_count", mc}};
  write_text(out_path(c, "geodesic_report.json"), report.dump(2) + "\n");

  std::string csv = "t";
  for (int i = 0; i < n; ++i) csv += ",x" + std::to_string(i + 1);
  for (int i = 0; i < n; ++i) csv += ",p" + std::to_string(i + 1);
  csv += ",detJac\n";
  const auto& g = j.geodesic();
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    csv += fmt(g.times[i]);
    for (int k = 0; k < n; ++k) csv += "," + fmt(g.states[i].x(k));
    for (int k = 0; k < n; ++k) csv += "," + fmt(g.states[i].p(k));
    csv += "," + fmt(j.frames()[i].topRows(n).determinant()) + "\n";
  }
  write_text(out_path(c, "geodesic.csv"), csv);

  if (a.sweep > 0) {
    // initial covectors rotated in the (p1, p2) plane
    if (n < 2) throw UsageError("--sweep needs n >= 2");
    std::vector<std::string> rows(a.sweep);
    parallel_for(static_cast<std::size_t>(a.sweep), [&](std::size_t i) {
      const double phi = 2 * std::numbers::pi * static_cast<double>(i) / a.sweep;
      Vec q = p0;
      q(0) = std::cos(phi) * p0(0) - std::sin(phi) * p0(1);
      q(1) = std::sin(phi) * p0(0) + std::cos(phi) * p0(1);
      const JacobiSystem js(s, {x0, q}, a.T, spu);
      const auto cts = conjugate_times(js);
      std::string r;
      for (int k = 0; k < n; ++k) r += (k ? "," : "") + fmt(q(k));
      if (cts.empty()) {
        r += ",";
        for (int k = 0; k < n; ++k) r += ",";
      } else {
        const Vec xc = js.at(cts[0].t).first.x;
        r += "," + fmt(cts[0].t);
        for (int k = 0; k < n; ++k) r += "," + fmt(xc(k));
      }
      rows[i] = r + "\n";
    });
    std::string sweep = "";
    for (int k = 0; k < n; ++k) sweep += (k ? ",p" : "p") + std::to_string(k + 1);
    sweep += ",first_conjugate_time";
    for (int k = 0; k < n; ++k) sweep += ",x" + std::to_string(k + 1);
    sweep += "\n";
    for (const auto& r : rows) sweep += r;
    write_text(out_path(c, "caustic.csv"), sweep);
  }
  Json summary{{"conjugate_times", Json::array()}, {"maslov_count", mc}};
  for (const auto& t : ct) summary["conjugate_times"].push_back(t.t);
  std::cout << summary.dump() << "\n";
  return 0;
}

// schubert

int run_schubert(const Common& c, int n) {
  validate(c);
  if (n < 1 || n > 20) throw UsageError("--n must be in [1, 20]");
  const auto cells = enumerate_symmetric_partitions(n);
  std::string csv = "partition,size,diagonal,codim\n";
  for (const auto& a : cells)
    csv += "\"" + a.to_string() + "\"," + std::to_string(a.size()) + "," + std::to_string(a.diagonal()) + "," +
           std::to_string(a.codim()) + "\n";
  write_text(out_path(c, "partitions.csv"), csv);
  Json config = common_config("schubert", c);
  config["n"] = n;
  Json poly{{"config", config}, {"n", n}, {"coefficients", poincare_polynomial(n)}, {"total", cells.size()}};
  write_text(out_path(c, "poincare.json"), poly.dump(2) + "\n");
  std::cout << csv;
  return 0;
}

int run_selftest(const Common& c) {
  AcceptanceOptions opt;
  opt.seed = c.seed;
  int failed = 0;
  run_acceptance(opt, [&](const CriterionResult& r) {
    std::cout << format_result(r) << std::endl;
    if (!r.pass) ++failed;
  });
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maslov index, pencils of quadrics, Morse folds, sub-Riemannian geodesics and Schubert cells"};
  app.require_subcommand(1);

  Common common;
  MaslovArgs margs;
  PencilArgs pargs;
  MorseArgs mo;
  GeodesicArgs ga;
  int schubert_n = 2;

  auto* maslov = app.add_subcommand("maslov", "Maslov index of a loop by winding and by crossings");
  add_common(maslov, common);
  maslov->add_option("--loop", margs.loop, "rotation | random | circle | ellipse | figure-eight")->capture_default_str();
  maslov->add_option("--n", margs.n, "half dimension")->capture_default_str();
  maslov->add_option("--delta-perturbation", margs.delta_perturbation, "Cayley size of the Delta perturbation")
      ->capture_default_str();

  auto* pencil = app.add_subcommand("pencil", "Stratify the sphere of a pencil of quadrics");
  add_common(pencil, common);
  pencil->add_option("--samples", pargs.samples, "base-locus samples")->capture_default_str();

  auto* morse = app.add_subcommand("morse", "Continue the multiplier curve of a Morse family");
  add_common(morse, common);
  morse->add_option("--family", mo.family, "cubic | quadratic | circle | normal-form")->capture_default_str();
  morse->add_option("--n", mo.n, "variables of the normal form")->capture_default_str();
  morse->add_option("--signs", mo.signs, "signs of the quadratic terms of the normal form")->delimiter(',');
  morse->add_option("--t-sign", mo.t_sign, "sign of the t x_1 term")->capture_default_str();
  morse->add_option("--c0", mo.c0, "constant term of the normal form")->capture_default_str();
  morse->add_option("--step", mo.step, "continuation step")->capture_default_str();
  morse->add_option("--s-max", mo.s_max, "arclength budget per direction")->capture_default_str();
  morse->add_option("--start-t", mo.start_t, "parameter of the starting point");
  morse->add_option("--start-x", mo.start_x, "comma-separated initial guess for x");

  auto* geo = app.add_subcommand("geodesic", "Normal geodesic, Jacobi determinant and conjugate times");
  add_common(geo, common);
  geo->add_option("--structure", ga.structure, "euclidean:n | heisenberg")->capture_default_str();
  geo->add_option("--x0", ga.x0, "comma-separated start point");
  geo->add_option("--p0", ga.p0, "comma-separated initial covector");
  geo->add_option("--T", ga.T, "final time")->required();
  geo->add_option("--sweep", ga.sweep, "grid size of the caustic sweep")->capture_default_str();

  auto* schubert = app.add_subcommand("schubert", "Symmetric partitions and the Poincare polynomial of L(n)");
  add_common(schubert, common);
  schubert->add_option("--n", schubert_n, "half dimension")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  add_common(selftest, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*maslov) return run_maslov(common, margs);
    if (*pencil) return run_pencil(common, pargs);
    if (*morse) return run_morse(common, mo);
    if (*geo) return run_geodesic(common, ga);
    if (*schubert) return run_schubert(common, schubert_n);
    if (*selftest) return run_selftest(common);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "usage error: malformed input: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
