#include "jhess/spec_io.hpp"

#include <cmath>
#include <fstream>

namespace jhess {

namespace {

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string(what) + ": expected an integer");
  return j.get<int>();
}

JordanAlgebra family_algebra(const Json& fam) {
  if (!fam.is_object() || !fam.contains("kind") || !fam.contains("n"))
    throw InputError("family: expected {\"kind\": ..., \"n\": ...}");
  const std::string kind = fam.at("kind").get<std::string>();
  const int n = integer(fam.at("n"), "family.n");
  if (kind == "sym") return JordanAlgebra::sym(n);
  if (kind == "spin") return JordanAlgebra::spin(n);
  if (kind == "componentwise") return JordanAlgebra::componentwise(n);
  throw InputError("family: unknown kind '" + kind + "'");
}

JordanAlgebra structure_algebra(const Json& s) {
  if (!s.is_array() || s.empty()) throw InputError("structure: expected a nonempty dim x dim x dim array");
  const int d = static_cast<int>(s.size());
  std::vector<double> c(static_cast<std::size_t>(d) * d * d);
  for (int g = 0; g < d; ++g) {
    if (!s[g].is_array() || static_cast<int>(s[g].size()) != d) throw InputError("structure: ragged array");
    for (int a = 0; a < d; ++a) {
      if (!s[g][a].is_array() || static_cast<int>(s[g][a].size()) != d) throw InputError("structure: ragged array");
      for (int b = 0; b < d; ++b) c[(static_cast<std::size_t>(g) * d + a) * d + b] = number(s[g][a][b], "structure");
    }
  }
  return JordanAlgebra(d, std::move(c));
}

Json family_json(const Family& f) {
  switch (f.kind) {
    case Family::Kind::componentwise:
      return {{"kind", "componentwise"}, {"n", f.n}};
    case Family::Kind::spin:
      return {{"kind", "spin"}, {"n", f.n}};
    case Family::Kind::sym:
      return {{"kind", "sym"}, {"n", f.n}};
    default:
      return nullptr;
  }
}

}  // namespace

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = number(j[i], "vector entry");
  return v;
}

Mat mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("expected a nonempty array of rows");
  const int r = static_cast<int>(j.size());
  const int c = j[0].is_array() ? static_cast<int>(j[0].size()) : -1;
  if (c < 1) throw InputError("expected a matrix (array of rows)");
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != c) throw InputError("ragged matrix");
    for (int k = 0; k < c; ++k) m(i, k) = number(j[i][k], "matrix entry");
  }
  return m;
}

Json to_json(const Vec& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json to_json(const Mat& m) {
  Json j = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

Json to_json(const Tensor& t) {
  if (t.rank() == 0) return t[0];
  std::function<Json(std::size_t, int)> rec = [&](std::size_t base, int level) -> Json {
    Json arr = Json::array();
    std::size_t stride = 1;
    for (int r = level + 1; r < t.rank(); ++r) stride *= static_cast<std::size_t>(t.dim());
    for (int i = 0; i < t.dim(); ++i) {
      const std::size_t off = base + static_cast<std::size_t>(i) * stride;
      arr.push_back(level + 1 == t.rank() ? Json(t[off]) : rec(off, level + 1));
    }
    return arr;
  };
  return rec(0, 0);
}

MetrisedAlgebra parse_algebra_spec(const Json& doc) {
  if (!doc.is_object()) throw InputError("algebra spec must be a JSON object");
  const int kinds = static_cast<int>(doc.contains("family")) + static_cast<int>(doc.contains("structure")) +
                    static_cast<int>(doc.contains("factors"));
  if (kinds != 1) throw InputError("algebra spec needs exactly one of \"family\", \"structure\", \"factors\"");

  std::optional<MetrisedAlgebra> base;
  if (doc.contains("factors")) {
    const Json& fs = doc.at("factors");
    if (!fs.is_array() || fs.empty()) throw InputError("factors: expected a nonempty array");
    std::vector<MetrisedAlgebra> parts;
    for (const auto& f : fs) parts.push_back(parse_algebra_spec(f));
    std::vector<double> w(parts.size(), 1.0);
    if (doc.contains("weights")) {
      const Vec wv = vec_from_json(doc.at("weights"));
      if (wv.size() != static_cast<int>(parts.size())) throw InputError("weights: one weight per factor required");
      for (int i = 0; i < wv.size(); ++i) w[i] = wv(i);
    }
    base = direct_sum(parts, w);
    if (parts.size() == 1) base = MetrisedAlgebra(base->algebra(), base->form(), w);
  } else {
    if (doc.contains("weights")) throw InputError("weights are only allowed together with factors");
    JordanAlgebra a = doc.contains("family") ? family_algebra(doc.at("family")) : structure_algebra(doc.at("structure"));
    if (!doc.contains("form")) {
      BilinearForm tau = trace_form(a);
      if (tau.degenerate()) throw InputError("degenerate form (trace form of this algebra is degenerate; supply \"form\")");
      return MetrisedAlgebra(std::move(a), std::move(tau));
    }
    base = MetrisedAlgebra(a, BilinearForm(Mat::Identity(a.dim(), a.dim())));
  }
  if (doc.contains("form")) {
    const Mat form = mat_from_json(doc.at("form"));
    if (form.rows() != base->dim() || form.cols() != base->dim()) throw InputError("form: wrong dimension");
    return MetrisedAlgebra(base->algebra(), BilinearForm(form), base->weights());
  }
  return *base;
}

Json algebra_to_json(const MetrisedAlgebra& m) {
  const JordanAlgebra& a = m.algebra();
  Json doc;
  const Family& f = a.family();
  if (f.kind == Family::Kind::direct_sum && f.euclidean()) {
    Json fs = Json::array();
    for (const auto& sub : f.factors) {
      Json fj = family_json(sub);
      if (fj.is_null()) {
        fs.clear();
        break;
      }
      fs.push_back({{"family", fj}});
    }
    if (!fs.empty()) {
      doc["factors"] = fs;
      if (!m.weights().empty()) doc["weights"] = m.weights();
    }
  } else if (f.kind != Family::Kind::raw && f.kind != Family::Kind::direct_sum) {
    doc["family"] = family_json(f);
  }
  if (doc.is_null()) {
    const int d = a.dim();
    Json s = Json::array();
    for (int g = 0; g < d; ++g) {
      Json mat = Json::array();
      for (int i = 0; i < d; ++i) {
        Json row = Json::array();
        for (int j = 0; j < d; ++j) row.push_back(a.structure(g, i, j));
        mat.push_back(row);
      }
      s.push_back(mat);
    }
    doc["structure"] = s;
  }
  doc["form"] = to_json(m.form().matrix());
  return doc;
}

BarrierSpec parse_barrier_spec(const Json& doc) {
  if (!doc.is_object() || !doc.contains("factors") || !doc.at("factors").is_array())
    throw InputError("barrier spec needs a \"factors\" array");
  BarrierSpec spec;
  for (const auto& f : doc.at("factors")) {
    if (!f.is_object() || !f.contains("algebra")) throw InputError("barrier factor needs an \"algebra\" entry");
    const MetrisedAlgebra m = parse_algebra_spec(f.at("algebra"));
    const double w = f.contains("weight") ? number(f.at("weight"), "weight") : 1.0;
    // A factor given as a declared direct sum contributes each of its parts with
    // the factor weight times the part weight.
    const auto parts = declared_factors(m.algebra());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const double inner = m.weights().size() == parts.size() ? m.weights()[k] : 1.0;
      spec.factors.push_back({parts[k], w * inner});
    }
  }
  spec.center = doc.contains("center") ? vec_from_json(doc.at("center")) : Vec::Zero(spec.dim());
  spec.offset = doc.contains("offset") ? number(doc.at("offset"), "offset") : 0.0;
  spec.validate();
  return spec;
}

Json barrier_to_json(const BarrierSpec& spec) {
  Json fs = Json::array();
  for (const auto& f : spec.factors) {
    Json fam = family_json(f.algebra.family());
    Json alg = fam.is_null() ? algebra_to_json(MetrisedAlgebra(f.algebra, trace_form(f.algebra)))
                             : Json{{"family", fam}};
    fs.push_back({{"algebra", alg}, {"weight", f.weight}});
  }
  return {{"factors", fs}, {"center", to_json(spec.center)}, {"offset", spec.offset}};
}

LoadedPotential load_potential(const Json& doc, const StencilConfig& stencil) {
  if (!doc.is_object()) throw InputError("potential spec must be a JSON object");
  std::string kind;
  if (doc.contains("kind")) {
    kind = doc.at("kind").get<std::string>();
  } else if (doc.contains("quadratic")) {
    kind = "quadratic";
  } else if (doc.contains("factors") && doc.at("factors").is_array() && !doc.at("factors").empty() &&
             doc.at("factors")[0].is_object() && doc.at("factors")[0].contains("algebra")) {
    kind = "barrier";
  } else {
    kind = "series";
  }

  if (kind == "barrier") {
    BarrierSpec spec = parse_barrier_spec(doc);
    const Vec anchor = barrier_anchor(spec);
    const double dist = barrier_boundary_distance(spec, anchor);
    return {canonical_barrier(spec, stencil), spec, std::nullopt, anchor, dist};
  }
  if (kind == "series") {
    const MetrisedAlgebra m = parse_algebra_spec(doc.contains("algebra") ? doc.at("algebra") : doc);
    const Vec anchor = Vec::Zero(m.dim());
    double cnorm = 0.0;
    for (double c : m.algebra().structure()) cnorm += c * c;
    const double dist = cnorm > 0.0 ? 1.0 / std::sqrt(cnorm) : 1.0;
    return {series_field(m, stencil), std::nullopt, m, anchor, dist};
  }
  if (kind == "quadratic") {
    const Mat q = mat_from_json(doc.at("quadratic"));
    return {quadratic_field(q), std::nullopt, std::nullopt, Vec::Zero(q.rows()), 1.0};
  }
  throw InputError("unknown potential kind '" + kind + "'");
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Json to_json(const VerificationReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) {
    Json j;
    j["point"] = to_json(p.point);
    if (!p.evaluated) {
      j["skipped"] = p.error;
      pts.push_back(j);
      continue;
    }
    j["residual_third"] = {{"raw", p.third.raw}, {"normalized", p.third.normalized}};
    j["residual_first"] = {{"raw", p.first.raw}, {"normalized", p.first.normalized}};
    j["unit"] = p.unit ? to_json(*p.unit) : Json(nullptr);
    j["center"] = p.center ? to_json(*p.center) : Json(nullptr);
    j["nu"] = p.nu ? Json(*p.nu) : Json(nullptr);
    Json tags = Json::array();
    for (auto s : p.sources) tags.push_back(to_string(s));
    j["source_tags"] = tags;
    pts.push_back(j);
  }
  auto summary = [](const ResidualSummary& s) {
    return Json{{"max", s.max}, {"mean", s.mean}, {"tolerance", s.tolerance}, {"pass", s.pass}};
  };
  return {{"field", r.field},
          {"points", pts},
          {"summary", {{"residual_third", summary(r.third)}, {"residual_first", summary(r.first)}, {"skipped", r.skipped}}}};
}

}  // namespace jhess
