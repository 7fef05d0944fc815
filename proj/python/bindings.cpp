#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "trichain/config.hpp"
#include "trichain/model.hpp"
#include "trichain/ode.hpp"
#include "trichain/oracle.hpp"
#include "trichain/pde.hpp"

namespace py = pybind11;
using namespace trichain;

namespace {

// Python-side right-hand sides receive (t, [y...]) and return [dy...].
RhsFn wrap_rhs(py::function f, size_t dim) {
  return [f, dim](double t, std::span<const double> y, std::span<double> dydt) {
    py::gil_scoped_acquire gil;
    std::vector<double> state(y.begin(), y.end());
    const std::vector<double> result = f(t, state).cast<std::vector<double>>();
    if (result.size() != dim) {
      throw std::runtime_error("rhs returned " + std::to_string(result.size()) +
                               " components, expected " + std::to_string(dim));
    }
    for (size_t i = 0; i < dim; ++i) dydt[i] = result[i];
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulation and verification toolkit for a three-species food chain "
            "with finite-time blow-up detection";
  m.attr("__version__") = kToolVersion;

  // ----- model -----
  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("a1", &ModelParams::a1)
      .def_readwrite("b1", &ModelParams::b1)
      .def_readwrite("w0", &ModelParams::w0)
      .def_readwrite("D0", &ModelParams::D0)
      .def_readwrite("a2", &ModelParams::a2)
      .def_readwrite("w1", &ModelParams::w1)
      .def_readwrite("D1", &ModelParams::D1)
      .def_readwrite("w2", &ModelParams::w2)
      .def_readwrite("D2", &ModelParams::D2)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("w3", &ModelParams::w3)
      .def_readwrite("D3", &ModelParams::D3)
      .def("validate", &ModelParams::validate)
      .def_static("reference_set", &ModelParams::reference_set);

  py::class_<State>(m, "State")
      .def(py::init<double, double, double>(), py::arg("u"), py::arg("v"), py::arg("r"))
      .def_readwrite("u", &State::u)
      .def_readwrite("v", &State::v)
      .def_readwrite("r", &State::r);

  py::class_<Rates>(m, "Rates")
      .def_readonly("du", &Rates::du)
      .def_readonly("dv", &Rates::dv)
      .def_readonly("dr", &Rates::dr);

  m.def("eval_rhs", &eval_rhs, py::arg("params"), py::arg("state"));

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("k", &ConditionReport::k)
      .def_readonly("rhs", &ConditionReport::rhs)
      .def_readonly("c", &ConditionReport::c)
      .def_readonly("satisfied", &ConditionReport::satisfied)
      .def("margin", &ConditionReport::margin);

  m.def("check_condition", &check_condition, py::arg("params"));

  py::enum_<RegionClass>(m, "RegionClass")
      .value("BelowLower", RegionClass::BelowLower)
      .value("RichDynamics", RegionClass::RichDynamics)
      .value("AboveUpper", RegionClass::AboveUpper);

  m.def("classify_region", &classify_region, py::arg("params"), py::arg("v"));

  // ----- ode -----
  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init<>())
      .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
      .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
      .def_readwrite("h_init", &IntegratorConfig::h_init)
      .def_readwrite("h_min", &IntegratorConfig::h_min)
      .def_readwrite("h_max", &IntegratorConfig::h_max)
      .def_readwrite("blowup_threshold", &IntegratorConfig::blowup_threshold)
      .def_readwrite("t_end", &IntegratorConfig::t_end)
      .def_readwrite("sample_stride", &IntegratorConfig::sample_stride)
      .def_readwrite("max_steps", &IntegratorConfig::max_steps)
      .def("validate", &IntegratorConfig::validate);

  py::enum_<TerminalStatus>(m, "TerminalStatus")
      .value("ReachedTEnd", TerminalStatus::ReachedTEnd)
      .value("BlowUpDetected", TerminalStatus::BlowUpDetected)
      .value("StepCollapse", TerminalStatus::StepCollapse);

  py::class_<TimeValue>(m, "TimeValue")
      .def(py::init<double, double>(), py::arg("t"), py::arg("value"))
      .def_readwrite("t", &TimeValue::t)
      .def_readwrite("value", &TimeValue::value);

  py::enum_<BlowUpMethod>(m, "BlowUpMethod")
      .value("NormEscape", BlowUpMethod::NormEscape)
      .value("StepCollapse", BlowUpMethod::StepCollapse);

  py::class_<BlowUpReport>(m, "BlowUpReport")
      .def_readonly("detected", &BlowUpReport::detected)
      .def_readonly("t_estimate", &BlowUpReport::t_estimate)
      .def_readonly("component", &BlowUpReport::component)
      .def_readonly("evidence", &BlowUpReport::evidence)
      .def_readonly("method", &BlowUpReport::method);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states)
      .def_readonly("terminal_status", &Trajectory::terminal_status)
      .def("u", [](const Trajectory& t) {
        std::vector<double> out;
        for (const State& s : t.states) out.push_back(s.u);
        return out;
      })
      .def("v", [](const Trajectory& t) {
        std::vector<double> out;
        for (const State& s : t.states) out.push_back(s.v);
        return out;
      })
      .def("r", [](const Trajectory& t) {
        std::vector<double> out;
        for (const State& s : t.states) out.push_back(s.r);
        return out;
      });

  py::class_<OdeResult>(m, "OdeResult")
      .def_readonly("trajectory", &OdeResult::trajectory)
      .def_readonly("report", &OdeResult::report);

  py::class_<GenericTrajectory>(m, "GenericTrajectory")
      .def_readonly("times", &GenericTrajectory::times)
      .def_readonly("states", &GenericTrajectory::states)
      .def_readonly("terminal_status", &GenericTrajectory::terminal_status);

  py::class_<GenericResult>(m, "GenericResult")
      .def_readonly("trajectory", &GenericResult::trajectory)
      .def_readonly("report", &GenericResult::report);

  m.def("integrate", &integrate, py::arg("params"), py::arg("initial"), py::arg("config"));
  m.def(
      "integrate_generic",
      [](py::function rhs, const std::vector<double>& s0, const IntegratorConfig& cfg) {
        py::gil_scoped_release release;
        return integrate_generic(wrap_rhs(std::move(rhs), s0.size()), s0, cfg);
      },
      py::arg("rhs"), py::arg("initial"), py::arg("config"));
  m.def(
      "estimate_blowup_time",
      [](const std::vector<TimeValue>& tail) { return estimate_blowup_time(tail); },
      py::arg("tail"));
  m.def(
      "estimate_blowup_time_from_pairs",
      [](const std::vector<std::pair<double, double>>& pairs) {
        std::vector<TimeValue> tail;
        for (const auto& [t, value] : pairs) tail.push_back({t, value});
        return estimate_blowup_time(tail);
      },
      py::arg("pairs"));

  // ----- oracle -----
  py::class_<OracleConfig>(m, "OracleConfig")
      .def(py::init<>())
      .def_readwrite("delta", &OracleConfig::delta)
      .def_readwrite("k", &OracleConfig::k)
      .def_readwrite("w4", &OracleConfig::w4)
      .def_readwrite("v1_0", &OracleConfig::v1_0)
      .def_readwrite("r1_0", &OracleConfig::r1_0)
      .def("comparison_window_end", &OracleConfig::comparison_window_end)
      .def("effective_w2", &OracleConfig::effective_w2);

  m.def("exact_r1", &exact_r1, py::arg("r1_0"), py::arg("delta"), py::arg("t"));
  m.def("exact_v1", &exact_v1, py::arg("v1_0"), py::arg("r1_0"), py::arg("a2"), py::arg("w2"),
        py::arg("delta"), py::arg("t"));
  m.def("choose_delta", &choose_delta, py::arg("params"), py::arg("report"));

  py::class_<VThreshold>(m, "VThreshold")
      .def_readonly("value", &VThreshold::value)
      .def_readonly("positive", &VThreshold::positive);

  m.def("v_threshold", &v_threshold, py::arg("params"), py::arg("k"), py::arg("delta"));

  py::class_<LargeData>(m, "LargeData")
      .def_readonly("v0", &LargeData::v0)
      .def_readonly("r0", &LargeData::r0);

  m.def("choose_blowup_data", &choose_blowup_data, py::arg("params"), py::arg("oracle_config"),
        py::arg("safety") = 2.0);
  m.def("make_oracle_config", &make_oracle_config, py::arg("params"), py::arg("report"),
        py::arg("safety") = 2.0);

  py::enum_<Domination>(m, "Domination")
      .value("Dominated", Domination::Dominated)
      .value("Violated", Domination::Violated)
      .value("Inconclusive", Domination::Inconclusive);

  m.def("check_domination", &check_domination, py::arg("full"), py::arg("oracle_config"),
        py::arg("params"), py::arg("tol_scale") = 1e-6);

  py::class_<PsiTrace>(m, "PsiTrace")
      .def_readonly("times", &PsiTrace::times)
      .def_readonly("psi_values", &PsiTrace::psi_values)
      .def_readonly("crossing_time", &PsiTrace::crossing_time);

  m.def("psi_trace", &psi_trace, py::arg("trajectory"), py::arg("params"), py::arg("r0"));

  // ----- pde -----
  py::enum_<BoundaryKind>(m, "BoundaryKind")
      .value("Neumann", BoundaryKind::Neumann)
      .value("Dirichlet", BoundaryKind::Dirichlet);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("dim", &GridSpec::dim)
      .def_readwrite("Lx", &GridSpec::Lx)
      .def_readwrite("Ly", &GridSpec::Ly)
      .def_readwrite("nx", &GridSpec::nx)
      .def_readwrite("ny", &GridSpec::ny)
      .def_readwrite("dt", &GridSpec::dt)
      .def_readwrite("bc", &GridSpec::bc)
      .def_readwrite("d1", &GridSpec::d1)
      .def_readwrite("d2", &GridSpec::d2)
      .def_readwrite("d3", &GridSpec::d3)
      .def("dx", &GridSpec::dx)
      .def("dy", &GridSpec::dy)
      .def("num_nodes", &GridSpec::num_nodes)
      .def("stable_dt_bound", &GridSpec::stable_dt_bound)
      .def("validate", &GridSpec::validate);

  py::class_<Field>(m, "Field")
      .def(py::init<>())
      .def_static("constant", &Field::constant, py::arg("grid"), py::arg("value"))
      .def_readwrite("nx", &Field::nx)
      .def_readwrite("ny", &Field::ny)
      .def_readwrite("values", &Field::values)
      .def("at", [](const Field& f, int i, int j) { return f.at(i, j); }, py::arg("i"),
           py::arg("j") = 0);

  py::class_<PdeState>(m, "PdeState")
      .def(py::init<>())
      .def_readwrite("u", &PdeState::u)
      .def_readwrite("v", &PdeState::v)
      .def_readwrite("r", &PdeState::r);

  m.def("laplacian", &laplacian, py::arg("grid"), py::arg("field"));

  py::class_<FieldNorms>(m, "FieldNorms")
      .def_readonly("linf", &FieldNorms::linf)
      .def_readonly("l1", &FieldNorms::l1)
      .def_readonly("l2", &FieldNorms::l2);

  m.def("field_norms", &field_norms, py::arg("grid"), py::arg("field"));
  m.def("discrete_mass", &discrete_mass, py::arg("grid"), py::arg("field"));
  m.def(
      "step",
      [](const GridSpec& g, const ModelParams& p, const PdeState& state, bool with_reactions) {
        return step(g, p, state, with_reactions);
      },
      py::arg("grid"), py::arg("params"), py::arg("state"), py::arg("with_reactions") = true);
  m.def("step_rk4", &step_rk4, py::arg("grid"), py::arg("params"), py::arg("state"),
        py::arg("with_reactions") = true);
  m.def(
      "semi_discrete_rhs",
      [](const GridSpec& g, const ModelParams& p, const PdeState& state, bool with_reactions) {
        return semi_discrete_rhs(g, p, state, with_reactions);
      },
      py::arg("grid"), py::arg("params"), py::arg("state"), py::arg("with_reactions") = true);

  py::class_<RunControl>(m, "RunControl")
      .def(py::init<>())
      .def_readwrite("t_end", &RunControl::t_end)
      .def_readwrite("sample_stride", &RunControl::sample_stride)
      .def_readwrite("blowup_threshold", &RunControl::blowup_threshold)
      .def_readwrite("snapshot_times", &RunControl::snapshot_times);

  py::class_<NormHistory>(m, "NormHistory")
      .def_readonly("times", &NormHistory::times)
      .def("linf", [](const NormHistory& n, int species) { return n.linf.at(species); },
           py::arg("species"))
      .def("l1", [](const NormHistory& n, int species) { return n.l1.at(species); },
           py::arg("species"))
      .def("l2", [](const NormHistory& n, int species) { return n.l2.at(species); },
           py::arg("species"));

  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("species", &Snapshot::species)
      .def_readonly("t", &Snapshot::t)
      .def_readonly("field", &Snapshot::field);

  py::enum_<PdeStatus>(m, "PdeStatus")
      .value("ReachedTEnd", PdeStatus::ReachedTEnd)
      .value("BlowUpDetected", PdeStatus::BlowUpDetected)
      .value("Diverged", PdeStatus::Diverged);

  py::class_<PdeRunResult>(m, "PdeRunResult")
      .def_readonly("norms", &PdeRunResult::norms)
      .def_readonly("report", &PdeRunResult::report)
      .def_readonly("snapshots", &PdeRunResult::snapshots)
      .def_readonly("status", &PdeRunResult::status)
      .def_readonly("t_final", &PdeRunResult::t_final)
      .def_readonly("steps", &PdeRunResult::steps)
      .def_readonly("clamped", &PdeRunResult::clamped)
      .def_readonly("failure_reason", &PdeRunResult::failure_reason)
      .def_readonly("final_state", &PdeRunResult::final_state);

  m.def("run", &run, py::arg("params"), py::arg("grid"), py::arg("initial"), py::arg("control"),
        py::call_guard<py::gil_scoped_release>());
}
