#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gradedrm/chain.hpp"
#include "gradedrm/cli.hpp"
#include "gradedrm/io.hpp"
#include "gradedrm/qmr_ops.hpp"
#include "gradedrm/verify.hpp"

namespace py = pybind11;
using namespace gradedrm;

namespace {

py::dict spectrum_dict(const SpectrumResult& s) {
  py::list levels;
  for (const auto& l : s.levels) levels.append(py::make_tuple(l.value, l.multiplicity));
  py::dict d;
  d["eigenvalues"] = s.eigenvalues;
  d["levels"] = levels;
  d["cluster_tolerance"] = s.cluster_tolerance;
  d["max_abs_imag"] = s.max_abs_imag;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gradedrm, m) {
  m.doc() = "Graded trigonometric R-matrices, difference operators and spin chains.";

  py::register_exception<SingularPointError>(m, "SingularPointError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Family>(m, "Family").value("UqGlNM", Family::UqGlNM).value("ZnGraded", Family::ZnGraded);
  py::enum_<Representation>(m, "Representation")
      .value("Auto", Representation::Auto)
      .value("Dense", Representation::Dense)
      .value("Factors", Representation::Factors);

  py::class_<GradedDim>(m, "GradedDim")
      .def(py::init<int, int>(), py::arg("n_even"), py::arg("n_odd"))
      .def_property_readonly("n_even", &GradedDim::n_even)
      .def_property_readonly("n_odd", &GradedDim::n_odd)
      .def_property_readonly("size", &GradedDim::size)
      .def("parity", &GradedDim::parity);

  py::enum_<RMatrixMutation::Kind>(m, "MutationKind")
      .value("DiagonalParitySign", RMatrixMutation::Kind::DiagonalParitySign)
      .value("OffDiagonalParitySign", RMatrixMutation::Kind::OffDiagonalParitySign)
      .value("SpectralExponentSign", RMatrixMutation::Kind::SpectralExponentSign)
      .value("WeightExponentSign", RMatrixMutation::Kind::WeightExponentSign)
      .value("HbarCotSign", RMatrixMutation::Kind::HbarCotSign);
  py::class_<RMatrixMutation>(m, "Mutation")
      .def(py::init([](RMatrixMutation::Kind k, int a, int c) { return RMatrixMutation{k, a, c}; }),
           py::arg("kind"), py::arg("a") = 0, py::arg("c") = 1)
      .def_readwrite("kind", &RMatrixMutation::kind)
      .def_readwrite("a", &RMatrixMutation::a)
      .def_readwrite("c", &RMatrixMutation::c);

  py::class_<RMatrixSpec>(m, "RMatrixSpec")
      .def(py::init(&make_spec), py::arg("family"), py::arg("n_even"), py::arg("n_odd"), py::arg("hbar"))
      .def_readonly("family", &RMatrixSpec::family)
      .def_readonly("dim", &RMatrixSpec::dim)
      .def_readwrite("hbar", &RMatrixSpec::hbar)
      .def_readwrite("mutation", &RMatrixSpec::mutation)
      .def("__repr__", &describe);

  py::class_<LocalOperator>(m, "LocalOperator")
      .def_property_readonly("legs", &LocalOperator::legs)
      .def_property_readonly("dim", &LocalOperator::dim)
      .def_property_readonly("coeffs", &LocalOperator::coeffs)
      .def("action", &LocalOperator::action)
      .def("leg_swapped", &LocalOperator::leg_swapped)
      .def("norm", &LocalOperator::norm)
      .def_static("from_action", &LocalOperator::from_action)
      .def_static("monomial", &LocalOperator::monomial, py::arg("dim"), py::arg("units"),
                  py::arg("coeff") = cplx(1.0));
  m.def("super_multiply", &super_multiply);
  m.def("graded_permutation", &graded_permutation);

  m.def("phi", &phi, py::arg("hbar"), py::arg("z"));
  m.def("build_r", &build_r, py::arg("spec"), py::arg("z"));
  m.def("build_r_normalized", &build_r_normalized, py::arg("spec"), py::arg("z"));
  m.def("build_f_derivative", &build_f_derivative, py::arg("spec"), py::arg("z"));
  m.def("c_matrix", &c_matrix, py::arg("spec"));

  m.def("check_qybe", &check_qybe);
  m.def("check_unitarity", &check_unitarity);
  m.def("check_twist", &check_twist);
  m.def("default_battery_specs", &default_battery_specs);
  m.def(
      "_run_battery",
      [](std::vector<RMatrixSpec> specs, std::uint64_t seed, int samples, std::optional<double> tolerance,
         std::optional<cplx> hbar) {
        BatteryOptions o{std::move(specs), seed, samples, tolerance, hbar};
        py::gil_scoped_release release;
        return run_battery(o).to_json().dump();
      },
      py::arg("specs"), py::arg("seed"), py::arg("samples"), py::arg("tolerance"), py::arg("hbar"));

  py::class_<ChainOperator>(m, "ChainOperator")
      .def_property_readonly("length", &ChainOperator::length)
      .def_property_readonly("dimension", &ChainOperator::dimension)
      .def_property_readonly("is_dense", &ChainOperator::is_dense)
      .def("to_dense", &ChainOperator::to_dense)
      .def("apply", py::overload_cast<const Vector&>(&ChainOperator::apply, py::const_),
           py::call_guard<py::gil_scoped_release>());
  m.def("hamiltonian_h1", &hamiltonian_h1, py::arg("spec"), py::arg("length"),
        py::arg("representation") = Representation::Auto);
  m.def("hamiltonian_h2", &hamiltonian_h2, py::arg("spec"), py::arg("length"),
        py::arg("representation") = Representation::Auto);
  m.def("htilde", &htilde_k, py::arg("spec"), py::arg("length"), py::arg("k"),
        py::arg("representation") = Representation::Auto);
  m.def("commutator_norm", &commutator_norm);
  m.def("equilibrium_points", &equilibrium_points);
  m.def("phi_sum_max_residual", &phi_sum_max_residual, py::arg("length"), py::arg("k"),
        py::arg("hbar") = kDefaultChainHbar);
  m.def("spectrum", [](const ChainOperator& op, double tol) { return spectrum_dict(spectrum(op, tol)); },
        py::arg("op"), py::arg("cluster_tolerance") = 1e-8);
  m.def("nonrelativistic_limit_h1", [](const RMatrixSpec& spec, int length) {
    const auto r = nonrelativistic_limit_h1(spec, length);
    return py::make_tuple(r.limit, r.extrapolation_error);
  });
  m.def("haldane_shastry_target", &haldane_shastry_target);
  m.def("anisotropic_target", &anisotropic_target);

  m.def(
      "f_identity_residual",
      [](int k, std::vector<cplx> z, cplx eta, const RMatrixSpec& spec) {
        return f_identity(k, SiteConfig{std::move(z), eta, spec.hbar}, spec).residual;
      },
      py::arg("k"), py::arg("z"), py::arg("eta"), py::arg("spec"));

  m.def("read_matrix_dump", [](const std::string& path) {
    const auto d = read_matrix_dump(std::filesystem::path(path));
    return py::make_tuple(d.spec, d.length, d.matrix);
  });

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "gradedrm");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
