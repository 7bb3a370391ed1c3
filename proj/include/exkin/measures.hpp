#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "exkin/chains.hpp"
#include "exkin/core_state.hpp"
#include "exkin/test_function.hpp"

namespace exkin {

// Uniform-weight (1/N) atoms on [0, inf).
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> atoms);
  explicit EmpiricalMeasure(const ContinuousWealthState& state);

  std::size_t size() const { return atoms_.size(); }
  std::span<const double> atoms() const { return atoms_; }
  double weight() const { return 1.0 / static_cast<double>(atoms_.size()); }

 private:
  std::vector<double> atoms_;
};

// <g, mu> = (1/N) sum_i g(x_i).
double bracket(const TestFunction& g, const EmpiricalMeasure& mu);

using PairFunction = std::function<double(double, double)>;

// <h, mu^(2,N)> as the ordered sum over distinct pairs, (1/N^2) sum_{i != j}.
double pair_bracket(const PairFunction& h, const EmpiricalMeasure& mu);
// Same quantity as <h, mu x mu> - (1/N) <h(x, x), mu>.
double pair_bracket_product_form(const PairFunction& h, const EmpiricalMeasure& mu);

inline constexpr std::size_t kDefaultQuadraticCap = 5000;

// The exchange integrand with the r-integral done in closed form:
// 1{x+y <= cap} (2 G(s)/s - g(x) - g(y)), s = x + y.
double exchange_kernel(const TestFunction& g, double x, double y, double wealth_cap);

// <g, Q^(N)(mu)> = (1/N^2) sum_{i != j} exchange_kernel(g, x_i, x_j, W_N).
// Quadratic in N; refuses measures larger than `cap` atoms unless g is
// conserved by every admissible exchange (then the value is exactly 0).
double qn_bracket(const TestFunction& g, const EmpiricalMeasure& mu, double wealth_cap,
                  std::size_t cap = kDefaultQuadraticCap);

// Maintains sum_{i != j} exchange_kernel(g, x_i, x_j, W) under pair
// exchanges in O(N) per update, with an exact O(N^2) refresh every 8N updates.
class DriftTracker {
 public:
  DriftTracker(const TestFunction& g, std::span<const double> wealth, double wealth_cap,
               std::size_t cap = kDefaultQuadraticCap);

  // <g, Q^(N)(mu)> for the tracked state.
  double drift() const;
  // Applies the exchange (first <- r s, second <- s - r s) and updates the sum.
  void exchange(AgentPair pair, double r);
  std::span<const double> wealth() const { return wealth_; }

 private:
  double kernel(double x, double gx, double y, double gy) const;
  void refresh();

  const TestFunction* g_;
  std::vector<double> wealth_;
  std::vector<double> g_values_;
  double cap_;
  double pair_sum_ = 0.0;
  std::size_t updates_since_refresh_ = 0;
  bool conserved_ = false;
};

struct MartingalePath {
  // Values are recorded at 0, just before and just after every jump, and at
  // the horizon; between jumps the path is linear, so these points carry the
  // running supremum.
  std::vector<double> times;
  std::vector<double> values;

  double sup_abs() const;
  double value_at_end() const { return values.back(); }
};

// M_t = <g, mu_t> - <g, mu_0> - int_0^t <g, Q^(N)(mu_s)> ds, with the time
// integral summed exactly over inter-jump intervals.
MartingalePath martingale_residual(const TrajectoryRecord& traj, const TestFunction& g, double wealth_cap);

struct EnsembleParams {
  std::size_t agents = 100;
  double horizon = 5.0;
  // Total wealth W_N; 0 means W_N = N.
  double total_wealth = 0.0;
  std::size_t replicas = 200;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

// Initial state of every ensemble replica: a uniform draw on the simplex of
// total W_N.
ContinuousWealthState ensemble_initial_state(const EnsembleParams& params, RngStream& rng);

struct MartingaleBoundReport {
  std::string g;
  std::size_t agents = 0;
  double horizon = 0.0;
  std::size_t replicas = 0;
  double empirical = 0.0;       // mean over replicas of sup_{s<=T} M_s^2
  double standard_error = 0.0;
  double mean_terminal = 0.0;   // mean of M_T
  double terminal_standard_error = 0.0;
  double bound = 0.0;           // 64 ||g||^2 T / N
  bool pass = false;
};

MartingaleBoundReport martingale_bound_check(const EnsembleParams& params, const TestFunction& g);

struct IncrementMomentReport {
  double start = 0.0;
  double end = 0.0;
  double empirical = 0.0;  // E[ sup_{r in [s,t)} <g, mu_r - mu_s>^2 ]
  double bound = 0.0;      // A ((t-s)^2 + (t-s)/N)
  bool pass = false;
};

// Second moment of the running increment of <g, mu> over [s, t), the
// quantity controlled by the tightness estimate with constant A.
IncrementMomentReport increment_moment_check(const EnsembleParams& params, const TestFunction& g, double start,
                                             double end, double constant);

}  // namespace exkin
