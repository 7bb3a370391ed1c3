#include "exkin/chains.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exkin {

AgentPair draw_pair(std::size_t agents, RngStream& rng) {
  const std::uint64_t others = agents - 1;
  const std::uint64_t idx = rng.below(static_cast<std::uint64_t>(agents) * others);
  const std::size_t first = static_cast<std::size_t>(idx / others);
  const std::size_t rest = static_cast<std::size_t>(idx % others);
  return {first, rest < first ? rest : rest + 1};
}

void exchange_discrete(std::span<std::int64_t> counts, AgentPair pair, std::uint64_t first_share) {
  const std::int64_t pooled = counts[pair.first] + counts[pair.second];
  if (pooled == 0) return;
  const auto share = static_cast<std::int64_t>(first_share);
  if (share < 0 || share >= pooled) throw std::out_of_range("first agent share must lie in {0, ..., s-1}");
  counts[pair.first] = share;
  counts[pair.second] = pooled - share;
}

void exchange_on_mesh(std::span<std::int64_t> units, AgentPair pair, double u) {
  const std::int64_t pooled = units[pair.first] + units[pair.second];
  if (pooled == 0) return;
  // floor(n * u * s / n) computed on the integer numerators.
  auto share = static_cast<std::int64_t>(std::floor(u * static_cast<double>(pooled)));
  share = std::clamp<std::int64_t>(share, 0, pooled - 1);
  units[pair.first] = share;
  units[pair.second] = pooled - share;
}

void exchange_continuous(std::span<double> wealth, AgentPair pair, double r) {
  const double pooled = wealth[pair.first] + wealth[pair.second];
  const double share = r * pooled;
  wealth[pair.first] = share;
  wealth[pair.second] = pooled - share;
}

DiscreteWealthState dsdt_step(const DiscreteWealthState& state, RngStream& rng) {
  std::vector<std::int64_t> counts(state.counts().begin(), state.counts().end());
  const AgentPair pair = draw_pair(counts.size(), rng);
  const std::int64_t pooled = counts[pair.first] + counts[pair.second];
  if (pooled > 0) exchange_discrete(counts, pair, rng.below(static_cast<std::uint64_t>(pooled)));
  return DiscreteWealthState(std::move(counts));
}

namespace {

std::vector<std::int64_t> mesh_units(const ContinuousWealthState& state, MeshSpec mesh) {
  if (!on_mesh(state.wealth(), mesh)) throw std::domain_error("state is not on the mesh 1/n");
  std::vector<std::int64_t> units(state.agents());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    units[i] = std::llround(state[i] * static_cast<double>(mesh.denominator));
    sum += units[i];
  }
  if (sum != mesh.denominator) throw std::domain_error("meshed state must have total 1");
  return units;
}

ContinuousWealthState from_units(std::span<const std::int64_t> units, MeshSpec mesh) {
  std::vector<double> w(units.size());
  const double n = static_cast<double>(mesh.denominator);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(units[i]) / n;
  return ContinuousWealthState(std::move(w), 1.0);
}

void check_pair(AgentPair pair, std::size_t agents) {
  if (pair.first == pair.second || pair.first >= agents || pair.second >= agents)
    throw std::out_of_range("invalid agent pair");
}

}  // namespace

ContinuousWealthState dsdt_apply_via_floor(const ContinuousWealthState& state, MeshSpec mesh, AgentPair pair,
                                           double u) {
  check_pair(pair, state.agents());
  auto units = mesh_units(state, mesh);
  exchange_on_mesh(units, pair, u);
  return from_units(units, mesh);
}

ContinuousWealthState dsdt_step_via_floor(const ContinuousWealthState& state, MeshSpec mesh, RngStream& rng) {
  const AgentPair pair = draw_pair(state.agents(), rng);
  return dsdt_apply_via_floor(state, mesh, pair, rng.uniform());
}

ContinuousWealthState csdt_apply(const ContinuousWealthState& state, AgentPair pair, double r) {
  check_pair(pair, state.agents());
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("exchange fraction must lie in [0, 1]");
  std::vector<double> w(state.wealth().begin(), state.wealth().end());
  exchange_continuous(w, pair, r);
  return ContinuousWealthState(std::move(w), state.total());
}

ContinuousWealthState csdt_step(const ContinuousWealthState& state, RngStream& rng) {
  const AgentPair pair = draw_pair(state.agents(), rng);
  return csdt_apply(state, pair, rng.uniform());
}

TrajectoryRecord poisson_simulate(const ContinuousWealthState& initial, const PoissonOptions& options,
                                  RngStream& rng) {
  if (!(options.horizon > 0.0)) throw std::domain_error("horizon must be positive");
  if (options.snapshot_interval < 0.0) throw std::domain_error("snapshot interval must be >= 0");
  const std::size_t agents = initial.agents();
  const double rate = static_cast<double>(agents - 1);

  TrajectoryRecord traj{initial, options.horizon, {}, {}};
  traj.events.reserve(static_cast<std::size_t>(rate * options.horizon * 1.1) + 16);
  std::vector<double> wealth(initial.wealth().begin(), initial.wealth().end());

  traj.snapshots.push_back({0.0, wealth});
  double next_snapshot = options.snapshot_interval > 0.0 ? options.snapshot_interval : options.horizon;
  auto emit_snapshots_before = [&](double t) {
    while (next_snapshot < t && next_snapshot < options.horizon) {
      traj.snapshots.push_back({next_snapshot, wealth});
      next_snapshot += options.snapshot_interval;
    }
  };

  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (t > options.horizon) break;
    emit_snapshots_before(t);
    const AgentPair pair = draw_pair(agents, rng);
    const double r = rng.uniform();
    exchange_continuous(wealth, pair, r);
    traj.events.push_back({t, pair.first, pair.second, r});
  }
  emit_snapshots_before(options.horizon);
  traj.snapshots.push_back({options.horizon, wealth});
  return traj;
}

ContinuousWealthState project_to_mesh(const ContinuousWealthState& state, MeshSpec mesh) {
  if (std::abs(state.total() - 1.0) > ContinuousWealthState::kConservationTolerance)
    throw std::domain_error("mesh projection requires total wealth 1");
  std::vector<std::int64_t> units(state.agents());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i + 1 < units.size(); ++i) {
    units[i] = static_cast<std::int64_t>(std::floor(state[i] * static_cast<double>(mesh.denominator)));
    assigned += units[i];
  }
  if (assigned > mesh.denominator) throw std::domain_error("entries exceed total after flooring");
  units.back() = mesh.denominator - assigned;
  return from_units(units, mesh);
}

double max_norm_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("states differ in size");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

CoupledPaths coupled_paths(const ContinuousWealthState& initial, MeshSpec mesh, std::size_t steps, RngStream& rng) {
  const ContinuousWealthState start = project_to_mesh(initial, mesh);
  auto units = mesh_units(start, mesh);
  std::vector<double> wealth(start.wealth().begin(), start.wealth().end());

  CoupledPaths out;
  out.discrete.reserve(steps + 1);
  out.continuous.reserve(steps + 1);
  out.discrete.push_back(start);
  out.continuous.push_back(start);
  for (std::size_t k = 0; k < steps; ++k) {
    const AgentPair pair = draw_pair(units.size(), rng);
    const double u = rng.uniform();
    exchange_on_mesh(units, pair, u);
    exchange_continuous(wealth, pair, u);
    out.discrete.push_back(from_units(units, mesh));
    out.continuous.push_back(ContinuousWealthState(wealth, 1.0));
    out.sup_distance =
        std::max(out.sup_distance, max_norm_distance(out.discrete.back().wealth(), out.continuous.back().wealth()));
  }
  return out;
}

}  // namespace exkin
