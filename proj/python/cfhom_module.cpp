#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfhom/driver.hpp"
#include "cfhom/errors.hpp"
#include "cfhom/macrosolver.hpp"
#include "cfhom/microsolver.hpp"
#include "cfhom/reaction.hpp"

namespace py = pybind11;
using namespace cfhom;

namespace {

KernelSet kernels_from(const std::string& coagulation, double a0, double zeta, const std::string& fragmentation,
                       double b, int n_max, double d0) {
  KernelConfig c;
  c.coagulation = coagulation;
  c.a0 = a0;
  c.zeta = zeta;
  c.fragmentation = fragmentation;
  c.b = b;
  c.n_max = n_max;
  c.d0 = d0;
  return make_kernels(c);
}

py::dict cell_dict(const CellSolution& s) {
  std::vector<std::vector<double>> A(s.dim, std::vector<double>(s.dim));
  for (int i = 0; i < s.dim; ++i)
    for (int j = 0; j < s.dim; ++j) A[i][j] = s.A[i][j];
  py::dict d;
  d["A"] = A;
  d["theta"] = s.theta;
  d["iterations"] = s.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cfhom, m) {
  m.doc() = "Coagulation-fragmentation-diffusion on perforated domains";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<KernelSet>(m, "KernelSet")
      .def_property_readonly("n_max", &KernelSet::n_max)
      .def("a", &KernelSet::a)
      .def("B", &KernelSet::B)
      .def("beta", &KernelSet::beta)
      .def("gamma", &KernelSet::gamma)
      .def("d", &KernelSet::d)
      .def_readonly("zeta", &KernelSet::zeta)
      .def_readonly("c_growth", &KernelSet::c_growth);

  m.def("build_kernels", &kernels_from, py::arg("coagulation") = "constant", py::arg("a0") = 1.0,
        py::arg("zeta") = 0.5, py::arg("fragmentation") = "binary_uniform", py::arg("b") = 0.5,
        py::arg("n_max") = 32, py::arg("d0") = 1.0);

  m.def("validate_kernels", [](const KernelSet& k) {
    py::list out;
    for (const auto& v : validate_kernels(k).violations) {
      py::dict d;
      d["constraint"] = v.constraint;
      d["indices"] = v.indices;
      d["detail"] = v.detail;
      out.append(d);
    }
    return out;
  });

  m.def("eval_coagulation", [](const KernelSet& k, const std::vector<double>& u) {
    auto r = eval_coagulation(k, u);
    return py::make_tuple(r.Q, r.mass_loss);
  });
  m.def("eval_fragmentation",
        [](const KernelSet& k, const std::vector<double>& u) { return eval_fragmentation(k, u); });
  m.def("weak_form_check", [](const KernelSet& k, const std::vector<double>& u, const std::vector<double>& phi) {
    const auto w = weak_form_check(k, u, phi);
    return py::make_tuple(w.coagulation_lhs, w.coagulation_rhs, w.fragmentation_lhs, w.fragmentation_rhs);
  });

  py::class_<PerforatedGrid>(m, "PerforatedGrid")
      .def_readonly("dim", &PerforatedGrid::dim)
      .def_readonly("h", &PerforatedGrid::h)
      .def_readonly("hole_count", &PerforatedGrid::hole_count)
      .def_readonly("fluid_volume", &PerforatedGrid::fluid_volume)
      .def_readonly("gamma_area", &PerforatedGrid::gamma_area)
      .def_property_readonly("shape", [](const PerforatedGrid& g) { return g.shape; })
      .def_property_readonly("dof_count", &PerforatedGrid::dof_count)
      .def_property_readonly("fluid", [](const PerforatedGrid& g) {
        return std::vector<int>(g.fluid.begin(), g.fluid.end());
      });

  m.def("build_perforated_grid",
        [](int dim, double L, double epsilon, double hole_radius, int m_cell) {
          return build_perforated_grid({dim, L, epsilon, hole_radius, m_cell});
        },
        py::arg("dim") = 2, py::arg("L") = 1.0, py::arg("epsilon") = 0.25, py::arg("hole_radius") = 0.25,
        py::arg("m_cell") = 16);
  m.def("build_reference_cell", &build_reference_cell, py::arg("dim"), py::arg("hole_radius"), py::arg("m_cell"));

  m.def("solve_cell_problem",
        [](int dim, double hole_radius, int m_cell) {
          return cell_dict(solve_cell_problem(build_reference_cell(dim, hole_radius, m_cell)));
        },
        py::arg("dim") = 2, py::arg("hole_radius") = 0.25, py::arg("m_cell") = 32);

  m.def("run_zerod",
        [](const KernelSet& k, std::vector<double> u0, double T, double dt, int record_stride) {
          py::gil_scoped_release release;
          auto r = run_zerod(k, std::move(u0), T, dt, record_stride);
          py::gil_scoped_acquire acquire;
          py::dict d;
          d["t"] = r.t;
          d["number"] = r.number;
          d["mass"] = r.mass;
          d["lost"] = r.lost;
          d["final_u"] = r.final_u;
          d["level"] = r.level;
          return d;
        },
        py::arg("kernels"), py::arg("u0"), py::arg("T"), py::arg("dt"), py::arg("record_stride") = 1);
  m.def("constant_kernel_number", &constant_kernel_number);

  m.def("resolve_config", [](const std::string& text) {
    return to_json(parse_config(nlohmann::json::parse(text))).dump();
  });

  m.def("run",
        [](const std::string& subcommand, const std::string& config_json, const std::string& out, int threads) {
          const auto cfg = parse_config(nlohmann::json::parse(config_json));
          py::gil_scoped_release release;
          return orchestrate(subcommand, cfg, out, CliOptions{threads, true});
        },
        py::arg("subcommand"), py::arg("config_json"), py::arg("out"), py::arg("threads") = 1);
}
