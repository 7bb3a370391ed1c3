#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "exkin/core_state.hpp"
#include "exkin/rng.hpp"

namespace exkin {

// Ordered pair of distinct agents; `first` is the agent whose new share is
// the drawn fraction of the pooled wealth.
struct AgentPair {
  std::size_t first = 0;
  std::size_t second = 1;
};

struct JumpEvent {
  double time = 0.0;
  std::size_t first_agent = 0;
  std::size_t second_agent = 1;
  double fraction = 0.0;
};

struct Snapshot {
  double time = 0.0;
  std::vector<double> wealth;
};

// Complete record of a Poissonized run: the initial state plus the event log
// is enough to replay the path exactly.
struct TrajectoryRecord {
  ContinuousWealthState initial;
  double horizon = 0.0;
  std::vector<JumpEvent> events;
  std::vector<Snapshot> snapshots;
};

// One draw uniform over the N(N-1) ordered pairs.
AgentPair draw_pair(std::size_t agents, RngStream& rng);

// In-place kernels shared by the simulators. Each touches only the pair.
void exchange_discrete(std::span<std::int64_t> counts, AgentPair pair, std::uint64_t first_share);
void exchange_on_mesh(std::span<std::int64_t> units, AgentPair pair, double u);
void exchange_continuous(std::span<double> wealth, AgentPair pair, double r);

// Discrete-space discrete-time step: with s = x_i + x_j >= 1 the first agent
// receives a uniform value in {0, ..., s-1}; s = 0 is a no-op.
DiscreteWealthState dsdt_step(const DiscreteWealthState& state, RngStream& rng);

// The same chain written on the meshed simplex: y_i' = [U (y_i + y_j)]_n.
// Inputs must be on mesh 1/n with total 1.
ContinuousWealthState dsdt_step_via_floor(const ContinuousWealthState& state, MeshSpec mesh, RngStream& rng);
ContinuousWealthState dsdt_apply_via_floor(const ContinuousWealthState& state, MeshSpec mesh, AgentPair pair,
                                           double u);

// Continuous-space discrete-time step: x_i' = r s, x_j' = s - r s.
ContinuousWealthState csdt_step(const ContinuousWealthState& state, RngStream& rng);
ContinuousWealthState csdt_apply(const ContinuousWealthState& state, AgentPair pair, double r);

struct PoissonOptions {
  double horizon = 1.0;
  // Snapshot spacing; 0 records only t = 0 and t = horizon.
  double snapshot_interval = 0.0;
};

// Each ordered pair rings at rate 1/N, so jumps form a Poisson process of
// total rate N - 1; at each ring the continuous exchange is applied.
TrajectoryRecord poisson_simulate(const ContinuousWealthState& initial, const PoissonOptions& options,
                                  RngStream& rng);

// Replays the event log; calls visit(event, wealth) after every jump.
template <typename Visitor>
void replay(const TrajectoryRecord& traj, Visitor&& visit) {
  std::vector<double> wealth(traj.initial.wealth().begin(), traj.initial.wealth().end());
  for (const auto& ev : traj.events) {
    exchange_continuous(wealth, {ev.first_agent, ev.second_agent}, ev.fraction);
    visit(ev, std::span<const double>(wealth));
  }
}

// Projects onto mesh 1/n: every agent but the last is floored and the
// remainder goes to the last agent. Requires total 1.
ContinuousWealthState project_to_mesh(const ContinuousWealthState& state, MeshSpec mesh);

struct CoupledPaths {
  std::vector<ContinuousWealthState> discrete;
  std::vector<ContinuousWealthState> continuous;
  double sup_distance = 0.0;
};

// Drives the meshed discrete chain and the continuous chain with the same
// pairs and the same uniforms for `steps` steps from the mesh projection of
// `initial`. sup_distance is the max-norm gap over steps 0..k; it never
// exceeds 2k/n.
CoupledPaths coupled_paths(const ContinuousWealthState& initial, MeshSpec mesh, std::size_t steps, RngStream& rng);

double max_norm_distance(std::span<const double> a, std::span<const double> b);

}  // namespace exkin
