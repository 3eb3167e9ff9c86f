#include "jhess/cli.hpp"
#include "jhess/geometry.hpp"
#include "jhess/spec_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace jhess;

namespace {

py::array_t<double> tensor_to_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.rank(), t.dim());
  py::array_t<double> out(shape);
  std::copy(t.data(), t.data() + t.size(), out.mutable_data());
  return out;
}

std::vector<double> structure_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& c,
                                         int& dim) {
  if (c.ndim() != 3 || c.shape(0) != c.shape(1) || c.shape(1) != c.shape(2))
    throw InputError("structure constants must have shape (d, d, d)");
  dim = static_cast<int>(c.shape(0));
  return std::vector<double>(c.data(), c.data() + c.size());
}

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(e.what());
  }
}

py::tuple residual_tuple(const Residual& r) { return py::make_tuple(r.raw, r.normalized); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Metrised Jordan algebras and Hessian potentials with parallel derivatives";

  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
  (void)input_error;

  py::class_<JordanAlgebra>(m, "JordanAlgebra")
      .def(py::init([](const py::array_t<double, py::array::c_style | py::array::forcecast>& c) {
             int dim = 0;
             auto flat = structure_from_array(c, dim);
             return JordanAlgebra(dim, std::move(flat));
           }),
           py::arg("structure"), "Algebra from structure constants C[gamma][alpha][beta].")
      .def_static("componentwise", &JordanAlgebra::componentwise, py::arg("n"))
      .def_static("spin", &JordanAlgebra::spin, py::arg("n"))
      .def_static("sym", &JordanAlgebra::sym, py::arg("n"))
      .def_property_readonly("dim", &JordanAlgebra::dim)
      .def_property_readonly("family", [](const JordanAlgebra& a) { return a.family().describe(); })
      .def("structure", [](const JordanAlgebra& a) { return tensor_to_array(a.structure_tensor()); })
      .def("multiply", &JordanAlgebra::multiply, py::arg("u"), py::arg("v"))
      .def("left_mult", &JordanAlgebra::left_mult, py::arg("u"))
      .def("power", &JordanAlgebra::power, py::arg("u"), py::arg("k"))
      .def("trace", &JordanAlgebra::trace, py::arg("u"));

  py::class_<MetrisedAlgebra>(m, "MetrisedAlgebra")
      .def(py::init([](const JordanAlgebra& a, const Mat& form) { return MetrisedAlgebra(a, BilinearForm(form)); }),
           py::arg("algebra"), py::arg("form"))
      .def_property_readonly("algebra", &MetrisedAlgebra::algebra)
      .def_property_readonly("form", [](const MetrisedAlgebra& ma) { return ma.form().matrix(); })
      .def_property_readonly("dim", &MetrisedAlgebra::dim)
      .def("to_json", [](const MetrisedAlgebra& ma) { return algebra_to_json(ma).dump(); });

  m.def("trace_form", [](const JordanAlgebra& a) { return trace_form(a).matrix(); }, py::arg("algebra"));
  m.def("with_trace_form", [](const JordanAlgebra& a) { return MetrisedAlgebra(a, trace_form(a)); },
        py::arg("algebra"));
  m.def("parse_algebra", [](const std::string& text) { return parse_algebra_spec(parse_text(text)); },
        py::arg("json_text"));
  m.def("direct_sum", &direct_sum, py::arg("parts"), py::arg("weights"));

  m.def("commutativity_residual", &commutativity_residual, py::arg("algebra"));
  m.def(
      "jordan_residual",
      [](const JordanAlgebra& a, int samples, std::uint64_t seed) { return jordan_residual(a, {samples, seed}); },
      py::arg("algebra"), py::arg("samples") = 64, py::arg("seed") = 0);
  m.def(
      "integrability_residual",
      [](const JordanAlgebra& a, int samples, std::uint64_t seed) {
        return integrability_residual(a, {samples, seed});
      },
      py::arg("algebra"), py::arg("samples") = 64, py::arg("seed") = 0);
  m.def(
      "invariance_residual",
      [](const MetrisedAlgebra& ma, int samples, std::uint64_t seed) {
        return invariance_residual(ma.algebra(), ma.form(), {samples, seed});
      },
      py::arg("algebra"), py::arg("samples") = 64, py::arg("seed") = 0);
  m.def("find_unit", &find_unit, py::arg("algebra"));
  m.def(
      "spectral",
      [](const JordanAlgebra& a, const Vec& x) {
        const auto sd = spectral(a, x);
        return py::make_tuple(sd.eigenvalues, sd.multiplicities, sd.idempotents);
      },
      py::arg("algebra"), py::arg("x"), "Returns (eigenvalues, multiplicities, idempotents).");
  m.def("determinant", &determinant, py::arg("algebra"), py::arg("x"));
  m.def("logdet", &logdet, py::arg("algebra"), py::arg("x"));
  m.def("inverse", &inverse, py::arg("algebra"), py::arg("x"));

  m.def("series_potential", [](const MetrisedAlgebra& ma, const Vec& x) { return series_potential(ma, x); },
        py::arg("algebra"), py::arg("x"));
  m.def("series_gradient", &series_gradient, py::arg("algebra"), py::arg("x"));
  m.def("series_hessian", &series_hessian, py::arg("algebra"), py::arg("x"));
  m.def(
      "series_third", [](const MetrisedAlgebra& ma, const Vec& x) { return tensor_to_array(series_third(ma, x)); },
      py::arg("algebra"), py::arg("x"));
  m.def("logdet_potential", &logdet_potential, py::arg("algebra"), py::arg("x"));

  py::class_<PotentialField>(m, "PotentialField")
      .def_property_readonly("dim", &PotentialField::dim)
      .def_property_readonly("label", &PotentialField::label)
      .def_property_readonly("provenance", [](const PotentialField& p) { return to_string(p.provenance()); })
      .def("contains", &PotentialField::contains, py::arg("x"))
      .def("value", &PotentialField::value, py::arg("x"))
      .def("gradient", &PotentialField::gradient, py::arg("x"))
      .def("hessian", &PotentialField::hessian, py::arg("x"))
      .def("third", [](const PotentialField& p, const Vec& x) { return tensor_to_array(p.third(x)); }, py::arg("x"))
      .def("fourth", [](const PotentialField& p, const Vec& x) { return tensor_to_array(p.fourth(x)); }, py::arg("x"))
      .def("source", [](const PotentialField& p, int order) { return to_string(p.source(order)); }, py::arg("order"));

  m.def("series_field", [](const MetrisedAlgebra& ma) { return series_field(ma); }, py::arg("algebra"));
  m.def("quadratic_field", &quadratic_field, py::arg("q"));
  m.def(
      "load_potential",
      [](const std::string& text) {
        LoadedPotential lp = load_potential(parse_text(text));
        return py::make_tuple(lp.field, lp.anchor);
      },
      py::arg("json_text"), "Returns (field, anchor) for a potential spec document.");
  m.def(
      "homogeneity_parameter",
      [](const std::string& text) { return homogeneity_parameter(parse_barrier_spec(parse_text(text))); },
      py::arg("barrier_json"));

  m.def(
      "residual_third_parallel",
      [](const PotentialField& p, const Vec& x) { return residual_tuple(residual_third_parallel(p, x)); },
      py::arg("field"), py::arg("x"), "Returns (raw, normalized).");
  m.def(
      "residual_first_parallel",
      [](const PotentialField& p, const Vec& x) { return residual_tuple(residual_first_parallel(p, x)); },
      py::arg("field"), py::arg("x"), "Returns (raw, normalized).");
  m.def(
      "recover_unit", [](const PotentialField& p, const Vec& x) { return recover_unit(sample_tensors(p, x, false)); },
      py::arg("field"), py::arg("x"));
  m.def("recover_center", &recover_center, py::arg("field"), py::arg("x"));
  m.def("recover_nu", &recover_nu, py::arg("field"), py::arg("x"));
  m.def(
      "reconstruct_algebra", [](const PotentialField& p, const Vec& x) { return reconstruct_algebra(p, x); },
      py::arg("field"), py::arg("x"));
  m.def("parallel_transport", &parallel_transport, py::arg("field"), py::arg("path"), py::arg("steps") = 200);
  m.def(
      "isomorphism_residual",
      [](const Mat& j, const MetrisedAlgebra& a, const MetrisedAlgebra& b, int samples, std::uint64_t seed) {
        return isomorphism_residual(j, a, b, {samples, seed});
      },
      py::arg("j"), py::arg("source"), py::arg("target"), py::arg("samples") = 64, py::arg("seed") = 0);
  m.def("metric_preservation_residual", &metric_preservation_residual, py::arg("field"), py::arg("path"),
        py::arg("j"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"jhess"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
