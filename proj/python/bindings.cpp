#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "maslovkit/acceptance.hpp"
#include "maslovkit/core.hpp"
#include "maslovkit/errors.hpp"
#include "maslovkit/maslov.hpp"
#include "maslovkit/morse.hpp"
#include "maslovkit/pencils.hpp"
#include "maslovkit/schubert.hpp"
#include "maslovkit/srgeo.hpp"

namespace py = pybind11;
using namespace maslovkit;

namespace {

LagrangianLoop loop_from_samples(const std::vector<double>& ts, const std::vector<Mat>& frames, bool closed) {
  if (ts.size() != frames.size()) throw Error(ErrorKind::Shape, "times and frames differ in length");
  std::vector<LagrangianFrame> fs;
  for (const auto& f : frames) fs.emplace_back(f);
  return LagrangianLoop(ts, std::move(fs), closed);
}

LagrangianFrame delta_or_default(const std::optional<Mat>& delta, int n) {
  return delta ? LagrangianFrame(*delta) : delta_frame(n);
}

py::list crossing_list(const std::vector<Crossing>& cs) {
  py::list out;
  for (const auto& c : cs) out.append(py::dict(py::arg("t") = c.t, py::arg("multiplicity") = c.multiplicity,
                                               py::arg("sign") = c.sign));
  return out;
}

}  // namespace

PYBIND11_MODULE(_maslovkit, m) {
  m.doc() = "Bindings of the maslovkit C++ library";
  static py::exception<Error> exc(m, "MaslovError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(e.what());
    }
  });

  m.def("is_lagrangian", [](const Mat& f, double tol) { return is_lagrangian(f, tol); }, py::arg("frame"),
        py::arg("tol") = 1e-8);
  m.def("intersection_dimension",
        [](const Mat& a, const Mat& b) { return intersection_dimension(LagrangianFrame(a), LagrangianFrame(b)); });
  m.def("chart_from_frame", [](const Mat& f) { return chart_from_frame(LagrangianFrame(f)).S(); },
        "S with the plane equal to {(x, S x)}");
  m.def("frame_from_chart", [](const Mat& s) { return frame_from_chart(SymmetricChart(s)).columns(); });
  m.def("change_chart", &change_chart, py::arg("S"), py::arg("A"), py::arg("B"));

  m.def(
      "maslov_indices",
      [](const std::vector<double>& ts, const std::vector<Mat>& frames, std::optional<Mat> delta) {
        const auto loop = loop_from_samples(ts, frames, true);
        const auto d = delta_or_default(delta, loop.n());
        return py::make_tuple(maslov_index_winding(loop), maslov_index_crossings(loop, d));
      },
      py::arg("times"), py::arg("frames"), py::arg("delta") = py::none(),
      "(winding index, crossing index) of a closed sampled loop");
  m.def(
      "crossings",
      [](const std::vector<double>& ts, const std::vector<Mat>& frames, std::optional<Mat> delta, bool closed) {
        const auto loop = loop_from_samples(ts, frames, closed);
        return crossing_list(find_crossings(loop, delta_or_default(delta, loop.n())));
      },
      py::arg("times"), py::arg("frames"), py::arg("delta") = py::none(), py::arg("closed") = true);
  m.def(
      "rotation_loop_indices",
      [](int n, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const auto loop = rotation_loop(n);
        const auto d = n == 1 ? delta_frame(1) : delta_frame(n).transformed(random_symplectic(n, 0.2, rng));
        return py::make_tuple(maslov_index_winding(loop), maslov_index_crossings(loop, d));
      },
      py::arg("n"), py::arg("seed") = 0);
  m.def(
      "gauss_loop_indices",
      [](const std::string& curve, int samples) {
        const PlaneCurve c = curve == "circle"         ? circle_curve()
                             : curve == "figure-eight" ? figure_eight_curve()
                                                       : throw Error(ErrorKind::Shape, "unknown curve " + curve);
        const auto loop = gauss_loop_from_plane_curve(c, samples);
        const auto b = crossing_count_bound(loop, delta_frame(1));
        return py::dict(py::arg("index_winding") = maslov_index_winding(loop),
                        py::arg("index_crossings") = maslov_index_crossings(loop, delta_frame(1)),
                        py::arg("crossing_count") = b.crossing_count,
                        py::arg("crossings") = crossing_list(find_crossings(loop, delta_frame(1))));
      },
      py::arg("curve"), py::arg("samples") = 256);

  m.def(
      "inertia",
      [](const Mat& q, double tol) {
        const auto i = inertia(q, tol);
        return py::make_tuple(i.pos, i.neg, i.ker);
      },
      py::arg("q"), py::arg("tol") = 1e-9);
  m.def(
      "stratify_pencil",
      [](std::optional<std::vector<Mat>> forms, int mesh_level, int samples, std::uint64_t seed) {
        const Pencil p = forms ? Pencil(*forms) : example_pencil();
        const auto s = stratify(p, SphereMesh::for_dimension(p.k(), mesh_level));
        py::list ovals, leb;
        for (const auto& o : s.ovals)
          ovals.append(py::dict(py::arg("id") = o.id, py::arg("sign") = o.sign, py::arg("length") = o.length,
                                py::arg("vertex_count") = o.vertex_count,
                                py::arg("self_antipodal") = o.self_antipodal));
        for (int j = 0; j <= p.n() + 1; ++j) {
          const auto w = lebesgue_set(s, j);
          leb.append(py::make_tuple(j, w.b0, w.euler));
        }
        BaseLocusOptions opt;
        opt.samples = samples;
        opt.seed = seed;
        const auto est = sample_base_locus_b0(p, opt);
        return py::dict(py::arg("ovals") = ovals, py::arg("duality_bound") = duality_bound(s),
                        py::arg("lebesgue") = leb, py::arg("base_locus_b0") = est.b0,
                        py::arg("base_locus_inconclusive") = est.inconclusive);
      },
      py::arg("forms") = py::none(), py::arg("mesh_level") = 6, py::arg("samples") = 2000, py::arg("seed") = 1);

  m.def(
      "morse_folds",
      [](const std::string& family, int n, std::vector<int> signs) {
        MorseFamily f = cubic_fold_family();
        MultiplierPoint seed;
        if (family == "cubic") {
          seed = MultiplierPoint{-1.0, 3.0, Vec::Ones(1)};
        } else if (family == "normal-form") {
          if (signs.empty()) signs.assign(n - 1, 1);
          f = fold_normal_form(n, 0.0, -1, signs);
          Vec x0 = Vec::Zero(n);
          x0(0) = 0.5;
          seed = seed_point(f, 0.75, x0);
        } else {
          throw Error(ErrorKind::Family, "unknown family " + family);
        }
        const auto curve = continue_curve(f, seed);
        const auto folds = detect_folds(curve, f);
        const auto prof = index_profile(curve, f, folds);
        py::list out;
        for (std::size_t i = 0; i < folds.size(); ++i)
          out.append(py::dict(py::arg("t") = folds[i].t, py::arg("x") = folds[i].x,
                              py::arg("index_before") = prof.jumps[i].before,
                              py::arg("index_after") = prof.jumps[i].after));
        return out;
      },
      py::arg("family") = "cubic", py::arg("n") = 2, py::arg("signs") = std::vector<int>{});

  m.def(
      "exponential",
      [](const std::string& structure, const Vec& x0, const Vec& p0, double t) {
        return exponential(FrameStructure::from_name(structure), x0, p0, t);
      },
      py::arg("structure"), py::arg("x0"), py::arg("p0"), py::arg("t"));
  m.def(
      "conjugate_times",
      [](const std::string& structure, const Vec& x0, const Vec& p0, double T) {
        py::list out;
        for (const auto& c : conjugate_times(FrameStructure::from_name(structure), x0, p0, T))
          out.append(py::make_tuple(c.t, c.multiplicity));
        return out;
      },
      py::arg("structure"), py::arg("x0"), py::arg("p0"), py::arg("T"));
  m.def(
      "maslov_count",
      [](const std::string& structure, const Vec& x0, const Vec& p0, double T) {
        return maslov_count(JacobiSystem(FrameStructure::from_name(structure), {x0, p0}, T));
      },
      py::arg("structure"), py::arg("x0"), py::arg("p0"), py::arg("T"));
  m.def(
      "restricted_hessian_min_eig",
      [](const std::string& structure, const Vec& x0, const Vec& p0, double s, int m) {
        return restricted_hessian_min_eig(FrameStructure::from_name(structure), x0, p0, s, m);
      },
      py::arg("structure"), py::arg("x0"), py::arg("p0"), py::arg("s"), py::arg("m") = 32);

  m.def("symmetric_partitions", [](int n) {
    py::list out;
    for (const auto& a : enumerate_symmetric_partitions(n))
      out.append(py::make_tuple(py::tuple(py::cast(a.parts())), a.size(), a.diagonal(), a.codim()));
    return out;
  });
  m.def("poincare_polynomial", &poincare_polynomial);
  m.def(
      "schubert_membership",
      [](const Mat& plane, const std::vector<int>& parts) {
        const SymmetricPartition a(parts);
        return schubert_membership(LagrangianFrame(plane), IsotropicFlag::standard(a.n()), a);
      },
      py::arg("plane"), py::arg("partition"), "membership for the standard flag p_1, ..., p_n, x_n, ..., x_1");

  m.def(
      "acceptance",
      [](std::vector<int> only, std::uint64_t seed) {
        AcceptanceOptions opt;
        opt.only = std::move(only);
        opt.seed = seed;
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_acceptance(opt);
        }
        py::list out;
        for (const auto& r : results)
          out.append(py::dict(py::arg("id") = r.id, py::arg("name") = r.name, py::arg("passed") = r.pass,
                              py::arg("detail") = r.detail, py::arg("seconds") = r.seconds));
        return out;
      },
      py::arg("only") = std::vector<int>{}, py::arg("seed") = 0);
}
