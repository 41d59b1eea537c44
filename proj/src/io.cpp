#include "maslovkit/io.hpp"

#include "maslovkit/errors.hpp"

namespace maslovkit::io {

namespace {

int require_n(const Json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() < 1)
    throw Error(ErrorKind::Shape, "missing positive integer field \"n\"");
  return j["n"].get<int>();
}

void require_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw Error(ErrorKind::Shape, std::string(what) + " has shape " + std::to_string(m.rows()) + "x" +
                                      std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                                      std::to_string(cols));
}

}  // namespace

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw Error(ErrorKind::Shape, "expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      throw Error(ErrorKind::Shape, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Json to_json(const Vec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec vector_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json frame_to_json(const LagrangianFrame& f) { return {{"n", f.n()}, {"columns", to_json(f.columns())}}; }

LagrangianFrame frame_from_json(const Json& j) {
  const int n = require_n(j);
  Mat c = matrix_from_json(j.at("columns"));
  require_shape(c, 2 * n, n, "columns");
  return LagrangianFrame(std::move(c));
}

Json chart_to_json(const SymmetricChart& c) { return {{"n", c.n()}, {"S", to_json(c.S())}}; }

SymmetricChart chart_from_json(const Json& j) {
  const int n = require_n(j);
  const Mat s = matrix_from_json(j.at("S"));
  require_shape(s, n, n, "S");
  return SymmetricChart(s);
}

Json loop_to_json(const LagrangianLoop& loop) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < loop.size(); ++i)
    samples.push_back({{"t", loop.params()[i]}, {"columns", to_json(loop.frames()[i].columns())}});
  return {{"n", loop.n()}, {"closed", loop.closed()}, {"samples", samples}};
}

LagrangianLoop loop_from_json(const Json& j) {
  const int n = require_n(j);
  std::vector<double> ts;
  std::vector<LagrangianFrame> frames;
  for (const auto& s : j.at("samples")) {
    ts.push_back(s.at("t").get<double>());
    Mat c = matrix_from_json(s.at("columns"));
    require_shape(c, 2 * n, n, "sample columns");
    frames.emplace_back(std::move(c));
  }
  if (ts.size() < 2) throw Error(ErrorKind::Shape, "a loop needs at least two samples");
  return LagrangianLoop(std::move(ts), std::move(frames), j.value("closed", true));
}

Json to_json(const Crossing& c) { return {{"t", c.t}, {"multiplicity", c.multiplicity}, {"sign", c.sign}}; }

Json pencil_to_json(const Pencil& p) {
  Json forms = Json::array();
  for (const auto& q : p.forms()) forms.push_back(to_json(q));
  return {{"n", p.n()}, {"forms", forms}};
}

Pencil pencil_from_json(const Json& j) {
  const int n = require_n(j);
  std::vector<Mat> forms;
  for (const auto& f : j.at("forms")) {
    forms.push_back(matrix_from_json(f));
    require_shape(forms.back(), n, n, "form");
  }
  return Pencil(std::move(forms));
}

Json polynomial_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& m : p.terms()) terms.push_back({{"coef", m.coef}, {"powers", m.powers}});
  return {{"variables", p.variables()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const Json& j) {
  const int vars = j.at("variables").get<int>();
  std::vector<Monomial> terms;
  for (const auto& t : j.at("terms")) {
    Monomial m{t.at("coef").get<double>(), t.at("powers").get<std::vector<int>>()};
    if (static_cast<int>(m.powers.size()) != vars) throw Error(ErrorKind::Shape, "monomial arity mismatch");
    terms.push_back(std::move(m));
  }
  return Polynomial(vars, std::move(terms));
}

MorseFamily family_from_json(const Json& j) {
  const int n = require_n(j);
  Polynomial f = polynomial_from_json(j.at("polynomial"));
  if (f.variables() != n + 1) throw Error(ErrorKind::Shape, "family polynomial must have n + 1 variables (t, x)");
  Box box;
  if (j.contains("box")) {
    const auto t = j["box"].at("t").get<std::array<double, 2>>();
    const auto x = j["box"].at("x").get<std::array<double, 2>>();
    box = Box{t[0], t[1], x[0], x[1]};
  }
  return MorseFamily(n, std::move(f), box, j.value("name", "polynomial"));
}

Json family_to_json(const MorseFamily& f) {
  Json j{{"n", f.n()},
         {"name", f.name()},
         {"box", {{"t", {f.box().t_min, f.box().t_max}}, {"x", {f.box().x_min, f.box().x_max}}}}};
  if (f.polynomial()) j["polynomial"] = polynomial_to_json(*f.polynomial());
  return j;
}

FrameStructure structure_from_json(const Json& j) {
  const int n = require_n(j);
  std::vector<std::vector<Polynomial>> fields;
  for (const auto& field : j.at("fields")) {
    std::vector<Polynomial> comps;
    for (const auto& c : field) comps.push_back(polynomial_from_json(c));
    fields.push_back(std::move(comps));
  }
  return FrameStructure(n, std::move(fields), j.value("name", "custom"));
}

Json structure_to_json(const FrameStructure& s) {
  Json j{{"n", s.n()}, {"name", s.name()}};
  if (s.exact()) {
    Json fields = Json::array();
    for (const auto& f : s.polynomial_fields()) {
      Json comps = Json::array();
      for (const auto& c : f) comps.push_back(polynomial_to_json(c));
      fields.push_back(std::move(comps));
    }
    j["fields"] = std::move(fields);
  }
  return j;
}

}  // namespace maslovkit::io
