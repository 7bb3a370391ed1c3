#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "exkin/core_state.hpp"

namespace exkin {

// A law on [0, inf) described through what the distance computations need.
class Distribution {
 public:
  virtual ~Distribution() = default;
  virtual double cdf(double x) const = 0;
  // inf { x >= 0 : cdf(x) >= q } for q in (0, 1).
  virtual double quantile(double q) const = 0;
  // int_0^x cdf(u) du.
  virtual double cdf_integral(double x) const = 0;
  virtual double mean() const = 0;
};

class ExponentialDistribution final : public Distribution {
 public:
  explicit ExponentialDistribution(double mean);
  double cdf(double x) const override;
  double quantile(double q) const override;
  double cdf_integral(double x) const override;
  double mean() const override { return mean_; }

 private:
  double mean_;
};

// Geometric(p) on {0, 1, 2, ...}: P(k) = p (1-p)^k.
class GeometricDistribution final : public Distribution {
 public:
  explicit GeometricDistribution(double p);
  double cdf(double x) const override;
  double quantile(double q) const override;
  double cdf_integral(double x) const override;
  double mean() const override { return (1.0 - p_) / p_; }

 private:
  double p_;
};

class PointMass final : public Distribution {
 public:
  explicit PointMass(double at) : at_(at) {}
  double cdf(double x) const override { return x >= at_ ? 1.0 : 0.0; }
  double quantile(double) const override { return at_; }
  double cdf_integral(double x) const override { return x > at_ ? x - at_ : 0.0; }
  double mean() const override { return at_; }

 private:
  double at_;
};

class UniformDistribution final : public Distribution {
 public:
  UniformDistribution(double lo, double hi);
  double cdf(double x) const override;
  double quantile(double q) const override;
  double cdf_integral(double x) const override;
  double mean() const override { return 0.5 * (lo_ + hi_); }

 private:
  double lo_, hi_;
};

// DKW half-width sqrt(ln(2/alpha) / (2n)).
double dkw_bound(std::size_t n, double alpha = 0.01);

// sup_x |F_emp(x) - F(x)| over sorted samples, checking both sides of each
// empirical jump.
double ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf);

// KS against a law on the integers, evaluated midway between lattice points
// (k + 1/2); samples that sit near but not on the lattice (rescaled integer
// draws) are then compared with the CDF they approximate.
double lattice_ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf);

// int_0^inf |F_emp - F| dx, integrated exactly between sample points with the
// analytic tail.
double wasserstein1(std::span<const double> sorted_samples, const Distribution& target);

// int_0^inf |F - G| dx for two laws, by adaptive splitting at both laws'
// quantiles; used for densities against closed-form targets.
double wasserstein1(const Distribution& a, const Distribution& b, double upper, std::size_t pieces = 20000);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  double critical = 0.0;  // chi-square quantile at 1 - alpha
  bool pass = false;
};

// Pearson chi-square with adjacent cells merged until every expected count
// is at least 5; passes when p > alpha.
ChiSquareResult chi_square_validate(std::span<const double> observed, std::span<const double> expected_probabilities,
                                    double alpha = 0.001);

class TransitionMatrix {
 public:
  TransitionMatrix(std::vector<DiscreteWealthState> states, std::vector<double> entries);

  std::size_t size() const { return states_.size(); }
  double operator()(std::size_t from, std::size_t to) const { return entries_[from * size() + to]; }
  const std::vector<DiscreteWealthState>& states() const { return states_; }
  std::size_t index_of(const DiscreteWealthState& state) const;

  double max_row_sum_error() const;
  double max_column_sum_error() const;

  // Row vector times matrix.
  std::vector<double> step(std::span<const double> distribution) const;
  // Law after k steps from a point mass at `from`.
  std::vector<double> k_step_law(std::size_t from, std::size_t steps) const;

 private:
  std::vector<DiscreteWealthState> states_;
  std::vector<double> entries_;
  std::map<DiscreteWealthState, std::size_t> index_;
};

inline constexpr std::uint64_t kTransitionMatrixCap = 10'000;

// Exact kernel of the integer exchange chain, summed over ordered pairs:
// 1/(N(N-1)) * (1/s if s >= 1 and x_j' >= 1, or 1 if s = 0), with the
// pooled sum preserved and every other agent unchanged.
TransitionMatrix build_transition_matrix(std::int64_t n, std::int64_t agents, std::uint64_t cap = kTransitionMatrixCap);

struct StationaryResult {
  std::vector<double> distribution;
  std::size_t iterations = 0;
  double residual = 0.0;  // L1 change at the last iteration
};

// Power iteration from a point mass on the first state until the L1 change
// is below tol; ConvergenceError after max_iterations.
StationaryResult stationary_distribution(const TransitionMatrix& matrix, double tol = 1e-13,
                                         std::size_t max_iterations = 1'000'000);

}  // namespace exkin
