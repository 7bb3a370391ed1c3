#include "exkin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "exkin/errors.hpp"

namespace exkin {

ExponentialDistribution::ExponentialDistribution(double mean) : mean_(mean) {
  if (!(mean > 0.0)) throw std::domain_error("exponential mean must be positive");
}

double ExponentialDistribution::cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-x / mean_); }

double ExponentialDistribution::quantile(double q) const { return -mean_ * std::log1p(-q); }

double ExponentialDistribution::cdf_integral(double x) const {
  if (x <= 0.0) return 0.0;
  return x + mean_ * std::expm1(-x / mean_);
}

GeometricDistribution::GeometricDistribution(double p) : p_(p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("geometric parameter must lie in (0, 1)");
}

double GeometricDistribution::cdf(double x) const {
  if (x < 0.0) return 0.0;
  const double k = std::floor(x);
  return -std::expm1((k + 1.0) * std::log1p(-p_));
}

double GeometricDistribution::quantile(double q) const {
  // smallest integer k with 1 - (1-p)^(k+1) >= q
  double k = std::ceil(std::log1p(-q) / std::log1p(-p_) - 1.0);
  k = std::max(0.0, k);
  while (k > 0.0 && cdf(k - 1.0) >= q) k -= 1.0;
  while (cdf(k) < q) k += 1.0;
  return k;
}

double GeometricDistribution::cdf_integral(double x) const {
  if (x <= 0.0) return 0.0;
  // int_0^x F = sum_{k < floor(x)} F(k) + (x - floor(x)) F(floor(x)),
  // with sum_{k=0}^{m-1} (1 - q^{k+1}) = m - q (1 - q^m) / (1 - q), q = 1-p.
  const double m = std::floor(x);
  const double q = 1.0 - p_;
  const double whole = m - q * (-std::expm1(m * std::log(q))) / p_;
  return whole + (x - m) * cdf(m);
}

UniformDistribution::UniformDistribution(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo >= 0.0 && hi > lo)) throw std::domain_error("uniform law needs 0 <= lo < hi");
}

double UniformDistribution::cdf(double x) const { return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0); }

double UniformDistribution::quantile(double q) const { return lo_ + q * (hi_ - lo_); }

double UniformDistribution::cdf_integral(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 0.5 * (hi_ - lo_) + (x - hi_);
  return 0.5 * (x - lo_) * (x - lo_) / (hi_ - lo_);
}

double dkw_bound(std::size_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf) {
  if (sorted_samples.empty()) throw std::invalid_argument("ks_statistic needs samples");
  const double n = static_cast<double>(sorted_samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double f = cdf(sorted_samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double lattice_ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf) {
  if (sorted_samples.empty()) throw std::invalid_argument("lattice_ks_statistic needs samples");
  const double n = static_cast<double>(sorted_samples.size());
  const double top = std::ceil(sorted_samples.back()) + 1.0;
  double d = 0.0;
  std::size_t below = 0;
  for (double k = 0.0; k <= top; k += 1.0) {
    while (below < sorted_samples.size() && sorted_samples[below] <= k + 0.5) ++below;
    d = std::max(d, std::abs(static_cast<double>(below) / n - cdf(k)));
  }
  return d;
}

double wasserstein1(std::span<const double> sorted_samples, const Distribution& target) {
  if (sorted_samples.empty()) throw std::invalid_argument("wasserstein1 needs samples");
  const std::size_t n = sorted_samples.size();
  const double nn = static_cast<double>(n);
  double total = target.cdf_integral(std::max(0.0, sorted_samples.front()));  // F_emp = 0 before the first atom
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = std::max(0.0, sorted_samples[i]);
    const double b = std::max(0.0, sorted_samples[i + 1]);
    if (b <= a) continue;
    const double c = static_cast<double>(i + 1) / nn;
    const double ia = target.cdf_integral(a);
    const double ib = target.cdf_integral(b);
    if (target.cdf(b) <= c) {
      total += c * (b - a) - (ib - ia);
    } else if (target.cdf(a) >= c) {
      total += (ib - ia) - c * (b - a);
    } else {
      const double x = std::clamp(target.quantile(c), a, b);
      const double ix = target.cdf_integral(x);
      total += c * (x - a) - (ix - ia) + (ib - ix) - c * (b - x);
    }
  }
  const double last = std::max(0.0, sorted_samples.back());
  total += target.mean() - last + target.cdf_integral(last);  // int_last^inf (1 - F)
  return total;
}

double wasserstein1(const Distribution& a, const Distribution& b, double upper, std::size_t pieces) {
  // Three-point Gauss-Legendre on each piece of [0, upper].
  static constexpr double kNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double kWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double h = upper / static_cast<double>(pieces);
  double total = 0.0;
  for (std::size_t p = 0; p < pieces; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (int q = 0; q < 3; ++q) {
      const double x = mid + 0.5 * h * kNodes[q];
      total += 0.5 * h * kWeights[q] * std::abs(a.cdf(x) - b.cdf(x));
    }
  }
  const double tail_a = a.mean() - upper + a.cdf_integral(upper);
  const double tail_b = b.mean() - upper + b.cdf_integral(upper);
  return total + std::abs(tail_a - tail_b);
}

ChiSquareResult chi_square_validate(std::span<const double> observed, std::span<const double> expected_probabilities,
                                    double alpha) {
  if (observed.size() != expected_probabilities.size() || observed.empty())
    throw std::invalid_argument("observed and expected must have equal nonzero length");
  const double total_prob = std::accumulate(expected_probabilities.begin(), expected_probabilities.end(), 0.0);
  if (!(total_prob > 0.0)) throw std::invalid_argument("expected probabilities are all zero");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);

  // Merge adjacent cells until each expected count reaches 5.
  std::vector<double> obs, expct;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += n * expected_probabilities[i] / total_prob;
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      expct.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (expct.empty()) {
      obs.push_back(o_acc);
      expct.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      expct.back() += e_acc;
    }
  }

  ChiSquareResult res;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double diff = obs[i] - expct[i];
    res.statistic += diff * diff / expct[i];
  }
  res.dof = obs.size() > 1 ? obs.size() - 1 : 0;
  if (res.dof == 0) {
    res.p_value = 1.0;
    res.pass = true;
    return res;
  }
  boost::math::chi_squared dist(static_cast<double>(res.dof));
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  res.critical = boost::math::quantile(boost::math::complement(dist, alpha));
  res.pass = res.p_value > alpha;
  return res;
}

TransitionMatrix::TransitionMatrix(std::vector<DiscreteWealthState> states, std::vector<double> entries)
    : states_(std::move(states)), entries_(std::move(entries)) {
  if (entries_.size() != states_.size() * states_.size()) throw std::invalid_argument("matrix size mismatch");
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::size_t TransitionMatrix::index_of(const DiscreteWealthState& state) const {
  auto it = index_.find(state);
  if (it == index_.end()) throw std::out_of_range("state not in the enumerated state space");
  return it->second;
}

double TransitionMatrix::max_row_sum_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += (*this)(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double TransitionMatrix::max_column_sum_error() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += (*this)(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

std::vector<double> TransitionMatrix::step(std::span<const double> distribution) const {
  std::vector<double> next(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    if (distribution[i] == 0.0) continue;
    for (std::size_t j = 0; j < size(); ++j) next[j] += distribution[i] * (*this)(i, j);
  }
  return next;
}

std::vector<double> TransitionMatrix::k_step_law(std::size_t from, std::size_t steps) const {
  std::vector<double> law(size(), 0.0);
  law.at(from) = 1.0;
  for (std::size_t k = 0; k < steps; ++k) law = step(law);
  return law;
}

TransitionMatrix build_transition_matrix(std::int64_t n, std::int64_t agents, std::uint64_t cap) {
  auto states = enumerate_states(n, agents, cap);
  const std::size_t size = states.size();
  std::vector<double> entries(size * size, 0.0);
  std::map<DiscreteWealthState, std::size_t> index;
  for (std::size_t i = 0; i < size; ++i) index.emplace(states[i], i);

  const auto N = static_cast<std::size_t>(agents);
  const double pair_weight = 1.0 / (static_cast<double>(N) * static_cast<double>(N - 1));
  for (std::size_t from = 0; from < size; ++from) {
    const auto& x = states[from];
    std::vector<std::int64_t> next(x.counts().begin(), x.counts().end());
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        if (i == j) continue;
        const std::int64_t pooled = x[i] + x[j];
        if (pooled == 0) {
          entries[from * size + from] += pair_weight;
          continue;
        }
        // x_i' in {0, ..., s-1} so that x_j' = s - x_i' >= 1, each with 1/s.
        for (std::int64_t share = 0; share < pooled; ++share) {
          next[i] = share;
          next[j] = pooled - share;
          const std::size_t to = index.at(DiscreteWealthState(next));
          entries[from * size + to] += pair_weight / static_cast<double>(pooled);
        }
        next[i] = x[i];
        next[j] = x[j];
      }
    }
  }
  return TransitionMatrix(std::move(states), std::move(entries));
}

StationaryResult stationary_distribution(const TransitionMatrix& matrix, double tol, std::size_t max_iterations) {
  StationaryResult res;
  res.distribution.assign(matrix.size(), 0.0);
  res.distribution[0] = 1.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    auto next = matrix.step(res.distribution);
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) change += std::abs(next[i] - res.distribution[i]);
    res.distribution = std::move(next);
    res.iterations = it;
    res.residual = change;
    if (change < tol) return res;
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iterations) + " iterations");
}

}  // namespace exkin
