#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "exkin/chains.hpp"
#include "exkin/core_state.hpp"
#include "exkin/errors.hpp"
#include "exkin/kinetic.hpp"
#include "exkin/measures.hpp"
#include "exkin/partitions.hpp"
#include "exkin/stats.hpp"

namespace py = pybind11;
using namespace exkin;

namespace {

template <class T>
py::array_t<T> to_array(std::span<const T> values) {
  py::array_t<T> out(values.size());
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<double> matrix_array(const TransitionMatrix& m) {
  py::array_t<double> out({m.size(), m.size()});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) r(i, j) = m(i, j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Binary wealth-exchange chains, kinetic solver and oracles";

  py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_ValueError);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def_property_readonly("seed", &RngStream::seed)
      .def_property_readonly("stream_id", &RngStream::stream_id);

  py::class_<DiscreteWealthState>(m, "DiscreteWealthState")
      .def(py::init<std::vector<std::int64_t>>(), py::arg("counts"))
      .def_property_readonly("agents", &DiscreteWealthState::agents)
      .def_property_readonly("total", &DiscreteWealthState::total)
      .def_property_readonly("counts", [](const DiscreteWealthState& s) { return to_array(s.counts()); });

  py::class_<ContinuousWealthState>(m, "ContinuousWealthState")
      .def(py::init<std::vector<double>>(), py::arg("wealth"))
      .def(py::init<std::vector<double>, double>(), py::arg("wealth"), py::arg("total"))
      .def_property_readonly("agents", &ContinuousWealthState::agents)
      .def_property_readonly("total", &ContinuousWealthState::total)
      .def_property_readonly("wealth", [](const ContinuousWealthState& s) { return to_array(s.wealth()); });

  m.def("dsdt_step", &dsdt_step, py::arg("state"), py::arg("rng"));
  m.def("csdt_step", &csdt_step, py::arg("state"), py::arg("rng"));

  m.def(
      "poisson_simulate",
      [](const ContinuousWealthState& start, double horizon, double snapshot_interval, RngStream& rng) {
        const auto traj = poisson_simulate(start, {horizon, snapshot_interval}, rng);
        py::array_t<double> times(traj.events.size()), fractions(traj.events.size());
        py::array_t<std::int64_t> pairs({traj.events.size(), std::size_t{2}});
        auto p = pairs.mutable_unchecked<2>();
        for (std::size_t k = 0; k < traj.events.size(); ++k) {
          times.mutable_data()[k] = traj.events[k].time;
          fractions.mutable_data()[k] = traj.events[k].fraction;
          p(k, 0) = static_cast<std::int64_t>(traj.events[k].first_agent);
          p(k, 1) = static_cast<std::int64_t>(traj.events[k].second_agent);
        }
        py::list snaps;
        for (const auto& s : traj.snapshots)
          snaps.append(py::make_tuple(s.time, to_array(std::span<const double>(s.wealth))));
        py::dict out;
        out["times"] = times;
        out["pairs"] = pairs;
        out["fractions"] = fractions;
        out["snapshots"] = snaps;
        return out;
      },
      py::arg("state"), py::arg("horizon"), py::arg("snapshot_interval") = 0.0, py::arg("rng"));

  m.def(
      "coupled_paths",
      [](const ContinuousWealthState& start, std::int64_t n, std::size_t steps, RngStream& rng) {
        const auto paths = coupled_paths(start, MeshSpec(n), steps, rng);
        return py::make_tuple(paths.sup_distance, paths.discrete.back(), paths.continuous.back());
      },
      py::arg("state"), py::arg("n"), py::arg("steps"), py::arg("rng"),
      "Returns (sup_distance, final discrete state, final continuous state).");

  py::class_<TestFunction>(m, "TestFunction")
      .def_static("constant", &TestFunction::constant)
      .def_static("exponential", &TestFunction::exponential, py::arg("rate") = 1.0)
      .def_static("capped_power", &TestFunction::capped_power, py::arg("cap"), py::arg("power"))
      .def_static("smoothed_indicator", &TestFunction::smoothed_indicator, py::arg("lo"), py::arg("hi"),
                  py::arg("ramp") = 0.01)
      .def("__call__", &TestFunction::operator(), py::arg("x"));

  py::class_<EmpiricalMeasure>(m, "EmpiricalMeasure")
      .def(py::init<std::vector<double>>(), py::arg("atoms"))
      .def(py::init<const ContinuousWealthState&>(), py::arg("state"))
      .def_property_readonly("size", &EmpiricalMeasure::size);

  m.def("bracket", &bracket, py::arg("g"), py::arg("mu"));
  m.def("qn_bracket", &qn_bracket, py::arg("g"), py::arg("mu"), py::arg("wealth_cap"),
        py::arg("cap") = kDefaultQuadraticCap);
  m.def(
      "q_bracket", [](const TestFunction& g, const EmpiricalMeasure& mu, double w0) { return q_bracket(g, mu, w0); },
      py::arg("g"), py::arg("mu"), py::arg("w0") = kUnboundedWealth);

  py::class_<EnsembleParams>(m, "EnsembleParams")
      .def(py::init<>())
      .def_readwrite("agents", &EnsembleParams::agents)
      .def_readwrite("horizon", &EnsembleParams::horizon)
      .def_readwrite("total_wealth", &EnsembleParams::total_wealth)
      .def_readwrite("replicas", &EnsembleParams::replicas)
      .def_readwrite("seed", &EnsembleParams::seed)
      .def_readwrite("jobs", &EnsembleParams::jobs);

  py::class_<MartingaleBoundReport>(m, "MartingaleBoundReport")
      .def_readonly("empirical", &MartingaleBoundReport::empirical)
      .def_readonly("standard_error", &MartingaleBoundReport::standard_error)
      .def_readonly("bound", &MartingaleBoundReport::bound)
      .def_readonly("passed", &MartingaleBoundReport::pass);
  m.def("martingale_bound_check", &martingale_bound_check, py::arg("params"), py::arg("g"));

  py::class_<GriddedDensity>(m, "GriddedDensity")
      .def(py::init<double, std::vector<double>>(), py::arg("x_max"), py::arg("values"))
      .def_property_readonly("x_max", &GriddedDensity::x_max)
      .def_property_readonly("dx", &GriddedDensity::dx)
      .def_property_readonly("values", [](const GriddedDensity& f) { return to_array(f.values()); })
      .def_property_readonly("centers",
                             [](const GriddedDensity& f) {
                               py::array_t<double> c(f.cells());
                               for (std::size_t k = 0; k < f.cells(); ++k) c.mutable_data()[k] = f.center(k);
                               return c;
                             })
      .def("mass", &GriddedDensity::mass)
      .def("first_moment", &GriddedDensity::first_moment);

  m.def("equilibrium_density", &equilibrium_density, py::arg("m"), py::arg("w0"), py::arg("x_max"), py::arg("cells"));
  m.def("make_density", &make_density, py::arg("spec"), py::arg("x_max"), py::arg("cells"));
  m.def(
      "qbar_apply",
      [](const GriddedDensity& f, double w0) {
        const auto q = qbar_apply(f, w0);
        return to_array(std::span<const double>(q));
      },
      py::arg("f"), py::arg("w0") = kUnboundedWealth);

  py::enum_<Integrator>(m, "Integrator").value("rk4", Integrator::rk4).value("euler", Integrator::euler);

  py::class_<KineticRunConfig>(m, "KineticRunConfig")
      .def(py::init<>())
      .def_readwrite("w0", &KineticRunConfig::w0)
      .def_readwrite("horizon", &KineticRunConfig::horizon)
      .def_readwrite("dt", &KineticRunConfig::dt)
      .def_readwrite("x_max", &KineticRunConfig::x_max)
      .def_readwrite("cells", &KineticRunConfig::cells)
      .def_readwrite("initial", &KineticRunConfig::initial)
      .def_readwrite("snapshot_interval", &KineticRunConfig::snapshot_interval)
      .def_readwrite("integrator", &KineticRunConfig::integrator)
      .def_readwrite("max_clip_per_step", &KineticRunConfig::max_clip_per_step);

  m.def(
      "kinetic_solve",
      [](const KineticRunConfig& config) {
        const auto sol = kinetic_solve(config);
        py::list snaps;
        for (const auto& s : sol.snapshots) snaps.append(py::make_tuple(s.time, s.density));
        py::dict out;
        out["snapshots"] = snaps;
        out["steps"] = sol.steps;
        out["clipped_mass_total"] = sol.clipped_mass_total;
        out["leaked_mass_total"] = sol.leaked_mass_total;
        return out;
      },
      py::arg("config"));

  m.def(
      "transition_matrix",
      [](std::int64_t n, std::int64_t agents) {
        const auto tm = build_transition_matrix(n, agents);
        py::list states;
        for (const auto& s : tm.states()) states.append(to_array(s.counts()));
        return py::make_tuple(matrix_array(tm), states);
      },
      py::arg("n"), py::arg("agents"), "Dense transition matrix and the state list in row order.");
  m.def(
      "stationary_distribution",
      [](std::int64_t n, std::int64_t agents) {
        const auto st = stationary_distribution(build_transition_matrix(n, agents));
        return to_array(std::span<const double>(st.distribution));
      },
      py::arg("n"), py::arg("agents"));

  m.def("sample_uniform_composition", &sample_uniform_composition, py::arg("n"), py::arg("agents"), py::arg("rng"));
  m.def("sample_scaled_geometric", &sample_scaled_geometric, py::arg("agents"), py::arg("total_wealth"),
        py::arg("rng"));
  m.def("sample_fixed_p_geometric", &sample_fixed_p_geometric, py::arg("agents"), py::arg("p"), py::arg("rng"));
  m.def("sample_uniform_simplex", &sample_uniform_simplex, py::arg("agents"), py::arg("rng"));

  py::class_<LimitReport>(m, "LimitReport")
      .def_readonly("sampler", &LimitReport::sampler)
      .def_readonly("target", &LimitReport::target)
      .def_readonly("statistic", &LimitReport::statistic)
      .def_readonly("wasserstein", &LimitReport::wasserstein)
      .def_readonly("threshold", &LimitReport::threshold)
      .def_readonly("passed", &LimitReport::pass);
  m.def(
      "limit_check",
      [](const std::string& sampler, const std::string& target, std::size_t agents, std::int64_t n,
         double total_wealth, double p, std::size_t samples, RngStream& rng, double epsilon) {
        SamplerSpec spec;
        spec.kind = parse_sampler_kind(sampler);
        spec.agents = agents;
        spec.n = n;
        spec.total_wealth = total_wealth;
        spec.p = p;
        spec.validate();
        return limit_check(spec, parse_limit_target(target), samples, rng, epsilon);
      },
      py::arg("sampler"), py::arg("target"), py::arg("agents"), py::arg("n") = 0, py::arg("total_wealth") = 0.0,
      py::arg("p") = 0.5, py::arg("samples") = 1, py::arg("rng"), py::arg("epsilon") = 0.01);
}
