#include "exkin/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "exkin/errors.hpp"

namespace exkin {

void SamplerSpec::validate() const {
  if (agents < 2) throw ConfigError("samplers need N >= 2");
  switch (kind) {
    case Kind::uniform_composition:
      if (n < 0) throw ConfigError("uniform_composition needs n >= 0");
      break;
    case Kind::scaled_geometric:
      if (!(total_wealth >= static_cast<double>(agents)))
        throw ConfigError("scaled_geometric needs W_N >= N so that p_N = N/W_N <= 1");
      break;
    case Kind::fixed_p_geometric:
      if (!(p > 0.0 && p < 1.0)) throw ConfigError("fixed_p_geometric needs 0 < p < 1");
      break;
    case Kind::uniform_simplex:
      break;
  }
}

SamplerSpec::Kind parse_sampler_kind(const std::string& name) {
  if (name == "uniform_composition") return SamplerSpec::Kind::uniform_composition;
  if (name == "scaled_geometric") return SamplerSpec::Kind::scaled_geometric;
  if (name == "fixed_p_geometric") return SamplerSpec::Kind::fixed_p_geometric;
  if (name == "uniform_simplex") return SamplerSpec::Kind::uniform_simplex;
  throw ConfigError("unknown sampler: " + name);
}

std::string to_string(SamplerSpec::Kind kind) {
  switch (kind) {
    case SamplerSpec::Kind::uniform_composition: return "uniform_composition";
    case SamplerSpec::Kind::scaled_geometric: return "scaled_geometric";
    case SamplerSpec::Kind::fixed_p_geometric: return "fixed_p_geometric";
    case SamplerSpec::Kind::uniform_simplex: return "uniform_simplex";
  }
  return "?";
}

DiscreteWealthState sample_uniform_composition(std::int64_t n, std::size_t agents, RngStream& rng) {
  if (n < 0 || agents < 2) throw std::domain_error("uniform composition needs n >= 0 and N >= 2");
  std::uint64_t rank = rng.below(composition_count(n, static_cast<std::int64_t>(agents)));
  std::vector<std::int64_t> counts(agents, 0);
  std::int64_t remaining = n;
  for (std::size_t i = 0; i + 1 < agents; ++i) {
    const std::uint64_t later = agents - i - 1;  // agents after i
    std::int64_t k = 0;
    for (;; ++k) {
      // compositions of (remaining - k) into `later` parts
      const std::uint64_t block =
          binomial(static_cast<std::uint64_t>(remaining - k) + later - 1, later - 1);
      if (rank < block) break;
      rank -= block;
    }
    counts[i] = k;
    remaining -= k;
  }
  counts.back() = remaining;
  return DiscreteWealthState(std::move(counts));
}

DiscreteWealthState sample_uniform_composition_rejection(std::int64_t n, std::size_t agents, RngStream& rng,
                                                         std::uint64_t max_attempts) {
  if (n < 0 || agents < 2) throw std::domain_error("uniform composition needs n >= 0 and N >= 2");
  const double p = static_cast<double>(agents) / (static_cast<double>(agents) + static_cast<double>(n));
  std::vector<std::int64_t> counts(agents);
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::uint64_t sum = 0;
    for (auto& c : counts) {
      c = static_cast<std::int64_t>(rng.geometric(p));
      sum += static_cast<std::uint64_t>(c);
      if (sum > static_cast<std::uint64_t>(n)) break;
    }
    if (sum == static_cast<std::uint64_t>(n)) return DiscreteWealthState(counts);
  }
  throw ConvergenceError("rejection sampler exhausted its attempt budget");
}

namespace {

ContinuousWealthState normalized_geometrics(std::size_t agents, double p, double total, RngStream& rng) {
  std::vector<double> g(agents);
  double sum = 0.0;
  for (auto& v : g) {
    v = static_cast<double>(rng.geometric(p));
    sum += v;
  }
  if (sum == 0.0) {
    std::fill(g.begin(), g.end(), total / static_cast<double>(agents));
    return ContinuousWealthState(std::move(g), total);
  }
  const double scale = total / sum;
  for (auto& v : g) v *= scale;
  return ContinuousWealthState(std::move(g), total);
}

}  // namespace

ContinuousWealthState sample_scaled_geometric(std::size_t agents, double total_wealth, RngStream& rng) {
  SamplerSpec{SamplerSpec::Kind::scaled_geometric, 0, agents, total_wealth, 0.5}.validate();
  const double p = static_cast<double>(agents) / total_wealth;
  return normalized_geometrics(agents, p, static_cast<double>(agents), rng);
}

ContinuousWealthState sample_fixed_p_geometric(std::size_t agents, double p, RngStream& rng) {
  SamplerSpec{SamplerSpec::Kind::fixed_p_geometric, 0, agents, 0.0, p}.validate();
  return normalized_geometrics(agents, p, (1.0 - p) / p * static_cast<double>(agents), rng);
}

ContinuousWealthState sample_uniform_simplex(std::size_t agents, RngStream& rng) {
  if (agents < 2) throw std::domain_error("uniform simplex needs N >= 2");
  std::vector<double> e(agents);
  double sum = 0.0;
  for (auto& v : e) {
    v = rng.exponential();
    sum += v;
  }
  const double scale = static_cast<double>(agents) / sum;
  for (auto& v : e) v *= scale;
  return ContinuousWealthState(std::move(e), static_cast<double>(agents));
}

ContinuousWealthState sample(const SamplerSpec& spec, RngStream& rng) {
  spec.validate();
  switch (spec.kind) {
    case SamplerSpec::Kind::uniform_composition:
      return ContinuousWealthState::from_discrete(sample_uniform_composition(spec.n, spec.agents, rng), 1.0);
    case SamplerSpec::Kind::scaled_geometric:
      return sample_scaled_geometric(spec.agents, spec.total_wealth, rng);
    case SamplerSpec::Kind::fixed_p_geometric:
      return sample_fixed_p_geometric(spec.agents, spec.p, rng);
    case SamplerSpec::Kind::uniform_simplex:
      return sample_uniform_simplex(spec.agents, rng);
  }
  throw ConfigError("unhandled sampler");
}

LimitTarget parse_limit_target(const std::string& name) {
  if (name == "exp" || name == "exponential" || name == "Exp(1)") return LimitTarget::exponential;
  if (name == "geom" || name == "geometric" || name == "Geom(p)") return LimitTarget::geometric;
  if (name == "delta0" || name == "point_mass_zero") return LimitTarget::point_mass_zero;
  throw ConfigError("unknown limit target: " + name);
}

std::string to_string(LimitTarget target) {
  switch (target) {
    case LimitTarget::exponential: return "Exp(1)";
    case LimitTarget::geometric: return "Geom(p)";
    case LimitTarget::point_mass_zero: return "delta0";
  }
  return "?";
}

LimitReport limit_check(const SamplerSpec& spec, LimitTarget target, std::size_t samples, RngStream& rng,
                        double epsilon) {
  spec.validate();
  using K = SamplerSpec::Kind;
  const bool valid = (spec.kind == K::scaled_geometric && target == LimitTarget::exponential) ||
                     (spec.kind == K::fixed_p_geometric && target == LimitTarget::geometric) ||
                     (spec.kind == K::uniform_simplex &&
                      (target == LimitTarget::exponential || target == LimitTarget::point_mass_zero));
  if (!valid)
    throw ConfigError("sampler " + to_string(spec.kind) + " has no limit theorem against " + to_string(target));
  if (samples == 0) throw ConfigError("limit_check needs at least one sample");

  LimitReport rep;
  rep.sampler = to_string(spec.kind);
  rep.target = target == LimitTarget::geometric ? "Geom(" + std::to_string(spec.p) + ")" : to_string(target);
  rep.agents = spec.agents;
  rep.samples = samples;
  rep.pass = true;
  const double n = static_cast<double>(spec.agents);

  for (std::size_t s = 0; s < samples; ++s) {
    const ContinuousWealthState draw = sample(spec, rng);
    std::vector<double> x(draw.wealth().begin(), draw.wealth().end());
    std::sort(x.begin(), x.end());
    double statistic = 0.0, w1 = 0.0, threshold = 0.0;
    switch (target) {
      case LimitTarget::exponential: {
        ExponentialDistribution law(1.0);
        statistic = ks_statistic(x, [&](double v) { return law.cdf(v); });
        w1 = wasserstein1(x, law);
        threshold = dkw_bound(spec.agents);
        break;
      }
      case LimitTarget::geometric: {
        GeometricDistribution law(spec.p);
        statistic = lattice_ks_statistic(x, [&](double v) { return law.cdf(v); });
        w1 = wasserstein1(x, law);
        threshold = dkw_bound(spec.agents);
        break;
      }
      case LimitTarget::point_mass_zero: {
        // Rescale to total 1; at most 1/epsilon coordinates can exceed epsilon.
        std::size_t above = 0;
        for (double& v : x) {
          v /= n;
          if (v > epsilon) ++above;
        }
        statistic = static_cast<double>(above) / n;
        w1 = wasserstein1(x, PointMass(0.0));
        threshold = 1.0 / (n * epsilon);
        break;
      }
    }
    rep.statistic = std::max(rep.statistic, statistic);
    rep.wasserstein = std::max(rep.wasserstein, w1);
    rep.threshold = threshold;
    if (!(statistic <= threshold)) rep.pass = false;
  }
  return rep;
}

}  // namespace exkin
