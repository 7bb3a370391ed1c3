#pragma once

#include <cstdint>
#include <string>

#include "exkin/core_state.hpp"
#include "exkin/rng.hpp"
#include "exkin/stats.hpp"

namespace exkin {

struct SamplerSpec {
  enum class Kind { uniform_composition, scaled_geometric, fixed_p_geometric, uniform_simplex };

  Kind kind = Kind::uniform_simplex;
  std::int64_t n = 0;          // uniform_composition: total units
  std::size_t agents = 2;      // N
  double total_wealth = 0.0;   // scaled_geometric: W_N
  double p = 0.5;              // fixed_p_geometric

  void validate() const;
};

SamplerSpec::Kind parse_sampler_kind(const std::string& name);
std::string to_string(SamplerSpec::Kind kind);

// Exactly uniform over all C(n+N-1, N-1) compositions: a uniform rank is
// drawn and unranked through the sequential marginals
// P(x_1 = k) = C(n-k+N-2, N-2) / C(n+N-1, N-1).
DiscreteWealthState sample_uniform_composition(std::int64_t n, std::size_t agents, RngStream& rng);

// i.i.d. Geometric(p) vectors conditioned on summing to n, by rejection with
// p = N/(N+n). Uniform for any p; kept as an independent cross-check.
DiscreteWealthState sample_uniform_composition_rejection(std::int64_t n, std::size_t agents, RngStream& rng,
                                                         std::uint64_t max_attempts = 100'000'000);

// N (G_1, ..., G_N) / sum G with G_i ~ Geometric(N / W_N); the all-ones
// state when every G_i is 0. Lies on N * simplex.
ContinuousWealthState sample_scaled_geometric(std::size_t agents, double total_wealth, RngStream& rng);

// (1-p)/p * N * (G_1, ..., G_N) / sum G with G_i ~ Geometric(p). An all-zero
// draw falls back to the all-equal state, mirroring the scaled variant.
ContinuousWealthState sample_fixed_p_geometric(std::size_t agents, double p, RngStream& rng);

// N (E_1, ..., E_N) / sum E with E_i ~ Exp(1): uniform on N * simplex.
ContinuousWealthState sample_uniform_simplex(std::size_t agents, RngStream& rng);

ContinuousWealthState sample(const SamplerSpec& spec, RngStream& rng);

enum class LimitTarget { exponential, geometric, point_mass_zero };

LimitTarget parse_limit_target(const std::string& name);
std::string to_string(LimitTarget target);

struct LimitReport {
  std::string sampler;
  std::string target;
  std::size_t agents = 0;
  std::size_t samples = 1;
  double statistic = 0.0;   // KS (or tail fraction for the point mass)
  double wasserstein = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Compares the single-draw empirical measure of the N coordinates with the
// target law. KS targets pass when the statistic is within the DKW bound at
// alpha = 0.01. For the point mass at 0 the uniform simplex is rescaled to
// total 1 and the fraction of coordinates above epsilon is compared with
// 1/(N epsilon). `samples` independent draws are all required to pass.
LimitReport limit_check(const SamplerSpec& spec, LimitTarget target, std::size_t samples, RngStream& rng,
                        double epsilon = 0.01);

}  // namespace exkin
