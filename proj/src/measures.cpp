#include "exkin/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "exkin/errors.hpp"
#include "exkin/parallel.hpp"
#include "exkin/partitions.hpp"

namespace exkin {

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("empirical measure needs at least one atom");
  for (double a : atoms_)
    if (!(a >= 0.0)) throw std::domain_error("atoms must be nonnegative");
}

EmpiricalMeasure::EmpiricalMeasure(const ContinuousWealthState& state)
    : EmpiricalMeasure(std::vector<double>(state.wealth().begin(), state.wealth().end())) {}

double bracket(const TestFunction& g, const EmpiricalMeasure& mu) {
  double s = 0.0;
  for (double a : mu.atoms()) s += g(a);
  return s * mu.weight();
}

double pair_bracket(const PairFunction& h, const EmpiricalMeasure& mu) {
  const auto atoms = mu.atoms();
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = 0; j < atoms.size(); ++j)
      if (i != j) s += h(atoms[i], atoms[j]);
  return s * mu.weight() * mu.weight();
}

double pair_bracket_product_form(const PairFunction& h, const EmpiricalMeasure& mu) {
  const auto atoms = mu.atoms();
  double full = 0.0, diagonal = 0.0;
  for (double x : atoms) {
    for (double y : atoms) full += h(x, y);
    diagonal += h(x, x);
  }
  const double w = mu.weight();
  return full * w * w - w * (diagonal * w);
}

double exchange_kernel(const TestFunction& g, double x, double y, double wealth_cap) {
  const double s = x + y;
  if (s > wealth_cap || s == 0.0) return 0.0;
  return 2.0 * g.split_average(s) - g(x) - g(y);
}

double qn_bracket(const TestFunction& g, const EmpiricalMeasure& mu, double wealth_cap, std::size_t cap) {
  if (g.conserved_below(wealth_cap)) return 0.0;
  const auto atoms = mu.atoms();
  if (atoms.size() > cap)
    throw ResourceLimitError("qn_bracket is quadratic; " + std::to_string(atoms.size()) + " atoms exceed cap " +
                             std::to_string(cap));
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j) s += exchange_kernel(g, atoms[i], atoms[j], wealth_cap);
  return 2.0 * s * mu.weight() * mu.weight();
}

DriftTracker::DriftTracker(const TestFunction& g, std::span<const double> wealth, double wealth_cap, std::size_t cap)
    : g_(&g), wealth_(wealth.begin(), wealth.end()), cap_(wealth_cap), conserved_(g.conserved_below(wealth_cap)) {
  if (!conserved_ && wealth_.size() > cap)
    throw ResourceLimitError("drift tracking is quadratic; " + std::to_string(wealth_.size()) +
                             " agents exceed cap " + std::to_string(cap));
  refresh();
}

double DriftTracker::kernel(double x, double gx, double y, double gy) const {
  const double s = x + y;
  if (s > cap_ || s == 0.0) return 0.0;
  return 2.0 * g_->split_average(s) - gx - gy;
}

void DriftTracker::refresh() {
  updates_since_refresh_ = 0;
  if (conserved_) {
    pair_sum_ = 0.0;
    return;
  }
  g_values_.resize(wealth_.size());
  for (std::size_t i = 0; i < wealth_.size(); ++i) g_values_[i] = (*g_)(wealth_[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < wealth_.size(); ++i)
    for (std::size_t j = i + 1; j < wealth_.size(); ++j) s += kernel(wealth_[i], g_values_[i], wealth_[j], g_values_[j]);
  pair_sum_ = 2.0 * s;
}

double DriftTracker::drift() const {
  const double n = static_cast<double>(wealth_.size());
  return pair_sum_ / (n * n);
}

void DriftTracker::exchange(AgentPair pair, double r) {
  const std::size_t a = pair.first, b = pair.second;
  const double old_a = wealth_[a], old_b = wealth_[b];
  const double pooled = old_a + old_b;
  const double new_a = r * pooled, new_b = pooled - new_a;
  if (!conserved_) {
    const double g_old_a = g_values_[a], g_old_b = g_values_[b];
    const double g_new_a = (*g_)(new_a), g_new_b = (*g_)(new_b);
    double delta = 0.0;
    for (std::size_t k = 0; k < wealth_.size(); ++k) {
      if (k == a || k == b) continue;
      const double x = wealth_[k], gx = g_values_[k];
      delta += kernel(new_a, g_new_a, x, gx) + kernel(new_b, g_new_b, x, gx) - kernel(old_a, g_old_a, x, gx) -
               kernel(old_b, g_old_b, x, gx);
    }
    delta += kernel(new_a, g_new_a, new_b, g_new_b) - kernel(old_a, g_old_a, old_b, g_old_b);
    pair_sum_ += 2.0 * delta;
    g_values_[a] = g_new_a;
    g_values_[b] = g_new_b;
  }
  wealth_[a] = new_a;
  wealth_[b] = new_b;
  if (++updates_since_refresh_ >= 8 * wealth_.size()) refresh();
}

double MartingalePath::sup_abs() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

MartingalePath martingale_residual(const TrajectoryRecord& traj, const TestFunction& g, double wealth_cap) {
  DriftTracker tracker(g, traj.initial.wealth(), wealth_cap);
  const double inv_n = 1.0 / static_cast<double>(traj.initial.agents());

  // N <g, mu_t> - N <g, mu_0>, tracked through the changed pair only.
  double observable_change = 0.0;
  double drift_integral = 0.0;
  double last_time = 0.0;

  MartingalePath path;
  path.times.reserve(2 * traj.events.size() + 2);
  path.values.reserve(2 * traj.events.size() + 2);
  path.times.push_back(0.0);
  path.values.push_back(0.0);

  for (const auto& ev : traj.events) {
    drift_integral += tracker.drift() * (ev.time - last_time);
    last_time = ev.time;
    path.times.push_back(ev.time);
    path.values.push_back(observable_change * inv_n - drift_integral);

    const auto w = tracker.wealth();
    const double old_a = w[ev.first_agent], old_b = w[ev.second_agent];
    tracker.exchange({ev.first_agent, ev.second_agent}, ev.fraction);
    const auto v = tracker.wealth();
    observable_change += g(v[ev.first_agent]) + g(v[ev.second_agent]) - g(old_a) - g(old_b);

    path.times.push_back(ev.time);
    path.values.push_back(observable_change * inv_n - drift_integral);
  }
  drift_integral += tracker.drift() * (traj.horizon - last_time);
  path.times.push_back(traj.horizon);
  path.values.push_back(observable_change * inv_n - drift_integral);
  return path;
}

ContinuousWealthState ensemble_initial_state(const EnsembleParams& params, RngStream& rng) {
  const double total = params.total_wealth > 0.0 ? params.total_wealth : static_cast<double>(params.agents);
  const auto simplex = sample_uniform_simplex(params.agents, rng);
  std::vector<double> w(simplex.wealth().begin(), simplex.wealth().end());
  const double scale = total / static_cast<double>(params.agents);
  for (auto& v : w) v *= scale;
  return ContinuousWealthState(std::move(w), total);
}

namespace {

struct MeanAndError {
  double mean = 0.0;
  double standard_error = 0.0;
};

MeanAndError summarize(const std::vector<double>& values) {
  MeanAndError out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  if (values.size() > 1) out.standard_error = std::sqrt(var / (n - 1.0) / n);
  return out;
}

}  // namespace

MartingaleBoundReport martingale_bound_check(const EnsembleParams& params, const TestFunction& g) {
  if (params.replicas < 100) throw ConfigError("martingale bound check needs at least 100 replicas");
  MartingaleBoundReport rep;
  rep.g = g.name();
  rep.agents = params.agents;
  rep.horizon = params.horizon;
  rep.replicas = params.replicas;
  const double n = static_cast<double>(params.agents);
  rep.bound = 64.0 * g.sup_bound() * g.sup_bound() * params.horizon / n;
  if (params.horizon == 0.0) {
    rep.pass = true;
    return rep;
  }

  std::vector<double> sup_squares(params.replicas), terminals(params.replicas);
  parallel_for(params.replicas, params.jobs, [&](std::size_t r) {
    RngStream rng(params.seed, r);
    const auto initial = ensemble_initial_state(params, rng);
    const auto traj = poisson_simulate(initial, {params.horizon, 0.0}, rng);
    // Pair sums never exceed the total; the slack absorbs rounding.
    const auto path = martingale_residual(traj, g, initial.total() * (1.0 + 1e-9));
    const double s = path.sup_abs();
    sup_squares[r] = s * s;
    terminals[r] = path.value_at_end();
  });
  const auto sup = summarize(sup_squares);
  const auto end = summarize(terminals);
  rep.empirical = sup.mean;
  rep.standard_error = sup.standard_error;
  rep.mean_terminal = end.mean;
  rep.terminal_standard_error = end.standard_error;
  rep.pass = rep.empirical <= rep.bound;
  return rep;
}

IncrementMomentReport increment_moment_check(const EnsembleParams& params, const TestFunction& g, double start,
                                             double end, double constant) {
  if (!(end > start && start >= 0.0)) throw ConfigError("increment window needs 0 <= s < t");
  IncrementMomentReport rep;
  rep.start = start;
  rep.end = end;
  const double n = static_cast<double>(params.agents);
  const double span = end - start;
  rep.bound = constant * (span * span + span / n);

  std::vector<double> sups(params.replicas);
  parallel_for(params.replicas, params.jobs, [&](std::size_t r) {
    RngStream rng(params.seed, r);
    const auto initial = ensemble_initial_state(params, rng);
    const auto traj = poisson_simulate(initial, {end, 0.0}, rng);
    std::vector<double> wealth(initial.wealth().begin(), initial.wealth().end());
    double value = 0.0;
    for (double w : wealth) value += g(w);
    double reference = value;  // N <g, mu_s>
    double sup = 0.0;
    for (const auto& ev : traj.events) {
      if (ev.time >= end) break;
      const double old_a = wealth[ev.first_agent], old_b = wealth[ev.second_agent];
      exchange_continuous(wealth, {ev.first_agent, ev.second_agent}, ev.fraction);
      value += g(wealth[ev.first_agent]) + g(wealth[ev.second_agent]) - g(old_a) - g(old_b);
      if (ev.time < start) {
        reference = value;
      } else {
        sup = std::max(sup, std::abs(value - reference) / n);
      }
    }
    sups[r] = sup * sup;
  });
  rep.empirical = summarize(sups).mean;
  rep.pass = rep.empirical <= rep.bound;
  return rep;
}

}  // namespace exkin
