#include "qoptics5/geometry.hpp"
#include "qoptics5/kernels.hpp"
#include "qoptics5/kg.hpp"
#include "qoptics5/limits.hpp"
#include "qoptics5/scenarios.hpp"
#include "qoptics5/sr5.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qoptics5;

namespace {

Units units(double c, double hbar) {
  Units u;
  u.c = c;
  u.hbar = hbar;
  return u;
}

Branch branch_of(const std::string& s) {
  if (s == "minus") return Branch::minus;
  if (s == "plus") return Branch::plus;
  throw PreconditionError("branch must be 'minus' or 'plus'");
}

py::dict pair_dict(const PairCreation& p) {
  py::dict d;
  d["X"] = Eigen::VectorXd(p.X.p);
  d["Xbar"] = Eigen::VectorXd(p.Xbar.p);
  d["conservation_residual"] = p.conservation_residual;
  d["null_residual"] = p.null_residual;
  d["invariant_mass_sq"] = p.invariant_mass_sq;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "qoptics5 core bindings";
  m.attr("__version__") = version();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<ThresholdError>(m, "ThresholdError", base.ptr());
  py::register_exception<OverflowError>(m, "CountOverflowError", base.ptr());
  py::register_exception<SingularError>(m, "SingularError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // geometry
  m.def("assemble_kk_point",
        [](const Mat4& g, const Vec4& A, double Phi, double q, double c) {
          return Eigen::MatrixXd(assemble_kk_point(g, A, Phi, q, units(c, 1.0)));
        },
        py::arg("g"), py::arg("A"), py::arg("Phi"), py::arg("q"), py::arg("c") = 1.0,
        "5x5 metric of the x5 foliation at one point.");
  m.def("extract_x5_point",
        [](const Mat5& h, double q, double c) {
          const auto p = extract_x5_point(h, q, units(c, 1.0));
          return py::make_tuple(Eigen::MatrixXd(p.g), Eigen::VectorXd(p.A), p.Phi);
        },
        py::arg("h"), py::arg("q"), py::arg("c") = 1.0, "Returns (g, A, Phi).");

  // lattice kernels
  m.def("count_null_paths",
        [](int steps, int dx, int dx5, int dims) {
          LatticePathModel mdl;
          mdl.steps = steps;
          mdl.dx = dx;
          mdl.dims = dims;
          return count_null_paths_micro(mdl, dx5).count;
        },
        py::arg("steps"), py::arg("dx"), py::arg("dx5"), py::arg("dims") = 2);
  m.def("canonical_kernel_qm",
        [](double lambda_inv, int steps, int dx, const std::string& branch) {
          LatticePathModel mdl;
          mdl.steps = steps;
          mdl.dx = dx;
          return canonical_kernel_qm(lambda_inv, mdl, branch_of(branch)).value;
        },
        py::arg("lambda_inv"), py::arg("steps"), py::arg("dx"), py::arg("branch") = "minus");

  // continuum limits
  m.def("sliced_propagator",
        [](double mass, double t, double x1, double x2, int slices, double V2, const std::string& branch) {
          SlicedFields f;
          f.V2 = V2;
          return sliced_propagator(mass, 0.0, t, x1, x2, slices, f, branch_of(branch));
        },
        py::arg("m"), py::arg("t"), py::arg("x1"), py::arg("x2"), py::arg("slices"), py::arg("V2") = 0.0,
        py::arg("branch") = "minus");
  m.def("free_propagator",
        [](double mass, double t, double x1, double x2, const std::string& branch) {
          return free_propagator(mass, 0.0, t, x1, x2, {}, branch_of(branch));
        },
        py::arg("m"), py::arg("t"), py::arg("x1"), py::arg("x2"), py::arg("branch") = "minus");
  m.def("fokker_planck_check",
        [](double Lambda, double u, int steps) {
          const auto r = fokker_planck_check(Lambda, u, 0.0, 0.0, steps);
          py::dict d;
          d["walk"] = r.walk;
          d["analytic"] = r.analytic;
          d["relative_error"] = r.relative_error;
          d["normalization"] = r.normalization;
          d["second_moment"] = r.second_moment;
          return d;
        },
        py::arg("Lambda"), py::arg("u"), py::arg("steps"));

  // Klein-Gordon
  m.def("kg_residual",
        [](int side, double box, double mu0_sq, int mode5) {
          KGSetup s{side, box, mu0_sq, mode5};
          const auto r = kg_residual(s);
          py::dict d;
          d["identity_residual"] = r.identity_residual;
          d["projected_residual"] = r.projected_residual;
          d["continuum_residual"] = r.continuum_residual;
          d["k5"] = r.k5;
          return d;
        },
        py::arg("side") = 5, py::arg("box") = 6.0, py::arg("mu0_sq") = 0.5, py::arg("mode5") = 1);
  m.def("moment_constants",
        [](double L) {
          const auto r = moment_constants(L);
          return py::make_tuple(r.A_inv, r.A_inv_closed);
        },
        py::arg("L"), "Returns (numerical, closed-form) for the integral of exp(-|eta|/L) over R^5.");

  // 5D special relativity
  m.def("make_null_momentum",
        [](double E, const Eigen::Vector3d& dir, double mass, double c) {
          return Eigen::VectorXd(make_null_momentum(E, dir, mass, units(c, 1.0)).p);
        },
        py::arg("E"), py::arg("direction"), py::arg("m"), py::arg("c") = 1.0);
  m.def("null_invariant", [](const Vec5& p) { return null_invariant(p); });
  m.def("pair_creation",
        [](const Vec5& p1, const Vec5& p2, double mX) {
          FiveMomentum a, b;
          a.p = p1;
          b.p = p2;
          return pair_dict(pair_creation(a, b, mX));
        },
        py::arg("photon1"), py::arg("photon2"), py::arg("mX"));

  // scenarios
  m.def("scenario_names", &scenario_names);
  m.def("run_scenario",
        [](const std::string& name, const std::map<std::string, std::string>& overrides) {
          auto cfg = make_config();
          cfg.set("run.scenario", name);
          for (const auto& [k, v] : overrides) cfg.set(k, v);
          const auto out = run_scenario(name, cfg);
          py::dict files;
          for (const auto& [f, body] : out.files) files[py::str(f)] = py::bytes(body);
          return files;
        },
        py::arg("name"), py::arg("overrides") = std::map<std::string, std::string>{},
        "Runs a scenario in memory and returns {file name: bytes}.");
}
