#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liqsched/benchmarks.hpp"
#include "liqsched/oracle.hpp"
#include "liqsched/riccati.hpp"
#include "liqsched/strategy.hpp"

namespace py = pybind11;
using namespace liqsched;

namespace {

CoefficientFn to_coeff(const py::object& o) {
    if (py::isinstance<py::float_>(o) || py::isinstance<py::int_>(o)) {
        return CoefficientFn::constant(o.cast<double>());
    }
    const auto d = o.cast<py::dict>();
    const auto kind = d.contains("kind") ? d["kind"].cast<std::string>() : std::string("constant");
    if (kind == "constant") return CoefficientFn::constant(d["value"].cast<double>());
    const auto bp = d["breakpoints"].cast<std::vector<double>>();
    const auto v = d["values"].cast<std::vector<double>>();
    if (kind == "piecewise_constant") return CoefficientFn::piecewise_constant(bp, v);
    if (kind == "piecewise_linear") return CoefficientFn::piecewise_linear(bp, v);
    throw Error(ErrorCode::BadConfig, "unknown coefficient kind " + kind);
}

ModelParams make_model(double eta, double gamma, double T, const py::object& rho,
                       const py::object& lambda) {
    ModelParams m;
    m.eta = eta;
    m.gamma = gamma;
    m.horizon_T = T;
    m.rho = to_coeff(rho);
    m.lambda = to_coeff(lambda);
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal liquidation under transient and persistent price impact";

    py::register_exception<Error>(m, "LiqschedError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "Model")
        .def(py::init(&make_model), py::arg("eta"), py::arg("gamma") = 0.0, py::arg("T") = 1.0,
             py::arg("rho") = py::float_(0.0), py::arg("lambda_") = py::float_(0.0))
        .def_readonly("eta", &ModelParams::eta)
        .def_readonly("gamma", &ModelParams::gamma)
        .def_readonly("T", &ModelParams::horizon_T);

    py::class_<RiccatiSolution>(m, "RiccatiSolution")
        .def_property_readonly("t", [](const RiccatiSolution& s) { return s.grid().t; })
        .def_property_readonly("tau", [](const RiccatiSolution& s) { return s.grid().tau; })
        .def_property_readonly("A", &RiccatiSolution::A)
        .def_property_readonly("B", &RiccatiSolution::B)
        .def_property_readonly("C", &RiccatiSolution::C)
        .def_property_readonly("D", &RiccatiSolution::D)
        .def_property_readonly("E", &RiccatiSolution::E)
        .def_property_readonly("delta", &RiccatiSolution::delta)
        .def_readonly("picard_iterations", &RiccatiSolution::picard_iterations)
        .def_readonly("contraction_ratios", &RiccatiSolution::contraction_ratios)
        .def("at", [](const RiccatiSolution& s, double t) {
            const auto p = s.at(t);
            return py::dict(py::arg("A") = p.A, py::arg("B") = p.B, py::arg("C") = p.C,
                            py::arg("D") = p.D, py::arg("E") = p.E);
        });

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("t", &Trajectory::t)
        .def_readonly("X", &Trajectory::X)
        .def_readonly("Y", &Trajectory::Y)
        .def_readonly("xi", &Trajectory::xi)
        .def_readonly("realized_cost", &Trajectory::realized_cost);

    m.def("solve", [](const ModelParams& model) { return solve_riccati(model); }, py::arg("model"));
    m.def("simulate",
          [](const RiccatiSolution& sol, double x0, double y0, std::size_t substeps) {
              ProblemInstance in{sol.model(), sol.grid().t0, x0, y0};
              return simulate_optimal(sol, in, {substeps, 1e-6});
          },
          py::arg("solution"), py::arg("x0") = 1.0, py::arg("y0") = 0.0, py::arg("substeps") = 4);
    m.def("value_function", &value_function, py::arg("solution"), py::arg("t"), py::arg("x"),
          py::arg("y"));
    m.def("feedback_rate", &feedback_rate, py::arg("solution"), py::arg("t"), py::arg("x"),
          py::arg("y"));
    m.def("check_bounds",
          [](const RiccatiSolution& sol, double tol) {
              py::dict out;
              for (const auto& c : check_a_priori_bounds(sol, tol).checks) {
                  out[py::str(c.name)] = py::make_tuple(c.pass, c.worst_margin);
              }
              return out;
          },
          py::arg("solution"), py::arg("tol") = 1e-8);
    m.def("oracle_value",
          [](const ModelParams& model, double x0, double y0, std::size_t N) {
              return oracle_value({model, 0.0, x0, y0}, N);
          },
          py::arg("model"), py::arg("x0") = 1.0, py::arg("y0") = 0.0, py::arg("N") = 500);
    m.def("obizhaeva_wang_schedule",
          [](double rho, double T, double x0) {
              const auto s = obizhaeva_wang_schedule(rho, T, x0);
              return py::make_tuple(s.initial_block, s.rate, s.terminal_block);
          },
          py::arg("rho"), py::arg("T"), py::arg("x0"));
}
