#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "exkin/errors.hpp"
#include "exkin/rng.hpp"
#include "exkin/stats.hpp"

using namespace exkin;

namespace {

std::vector<double> exp_samples(std::size_t n, RngStream& rng) {
  std::vector<double> s(n);
  for (auto& x : s) x = rng.exponential();
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("DKW half-width") {
  CHECK(dkw_bound(10000) == doctest::Approx(0.016276).epsilon(1e-4));
  CHECK(dkw_bound(10000, 0.05) < dkw_bound(10000, 0.01));
}

TEST_CASE("KS degenerate cases") {
  const ExponentialDistribution e(1.0);
  auto cdf = [&](double x) { return e.cdf(x); };
  const std::vector<double> median{std::log(2.0)};
  CHECK(ks_statistic(median, cdf) == doctest::Approx(0.5));
  const std::vector<double> zeros(100, 0.0);
  CHECK(ks_statistic(zeros, cdf) == 1.0);
  CHECK_THROWS(ks_statistic(std::vector<double>{}, cdf));
}

TEST_CASE("KS of target samples stays under the DKW bound") {
  const ExponentialDistribution e(1.0);
  int passes = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    RngStream rng(100, static_cast<std::uint64_t>(r));
    const auto s = exp_samples(10000, rng);
    passes += ks_statistic(s, [&](double x) { return e.cdf(x); }) <= dkw_bound(s.size()) ? 1 : 0;
  }
  CHECK(passes >= 197);  // >= 99% up to Monte Carlo slack
}

TEST_CASE("lattice KS") {
  const GeometricDistribution geo(0.5);
  RngStream rng(3, 0);
  std::vector<double> s(10000);
  for (auto& x : s) x = static_cast<double>(rng.geometric(0.5));
  std::sort(s.begin(), s.end());
  CHECK(lattice_ks_statistic(s, [&](double x) { return geo.cdf(x); }) <= dkw_bound(s.size()));
  const GeometricDistribution wrong(0.4);
  CHECK(lattice_ks_statistic(s, [&](double x) { return wrong.cdf(x); }) > dkw_bound(s.size()));
}

TEST_CASE("Wasserstein-1") {
  const ExponentialDistribution e(1.0);
  const std::vector<double> zeros(10, 0.0);
  CHECK(wasserstein1(zeros, e) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> at_m(5, 2.5);
  CHECK(wasserstein1(at_m, PointMass(2.5)) == doctest::Approx(0.0).epsilon(1e-15));
  std::vector<double> q(10000);
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = e.quantile(static_cast<double>(k + 1) / 10001.0);
  CHECK(wasserstein1(q, e) <= 0.01);
  // Between two exponentials the distance is the difference of means.
  CHECK(wasserstein1(ExponentialDistribution(1.0), ExponentialDistribution(1.5), 80.0) ==
        doctest::Approx(0.5).epsilon(1e-6));
  CHECK(wasserstein1(UniformDistribution(0.0, 2.0), PointMass(1.0), 10.0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("distribution quantiles invert the CDF") {
  const ExponentialDistribution e(2.0);
  CHECK(e.cdf(e.quantile(0.3)) == doctest::Approx(0.3));
  CHECK(e.cdf_integral(1.0) == doctest::Approx(1.0 - 2.0 * (1.0 - std::exp(-0.5))));
  const GeometricDistribution g(0.5);
  CHECK(g.cdf(0.0) == doctest::Approx(0.5));
  CHECK(g.cdf(0.99) == doctest::Approx(0.5));
  CHECK(g.cdf(1.0) == doctest::Approx(0.75));
  CHECK(g.quantile(0.5) == 0.0);
  CHECK(g.quantile(0.6) == 1.0);
  CHECK(g.mean() == 1.0);
}

TEST_CASE("chi-square") {
  const std::vector<double> probs{0.2, 0.3, 0.5};
  const auto exact = chi_square_validate(std::vector<double>{200, 300, 500}, probs);
  CHECK(exact.statistic == 0.0);
  CHECK(exact.pass);
  CHECK_THROWS(chi_square_validate(std::vector<double>{1, 2}, std::vector<double>{0.0, 0.0}));
  CHECK_THROWS(chi_square_validate(std::vector<double>{1, 2}, probs));

  // Calibration: a correct uniform 3-state sampler passes; a 5% shift fails.
  int passes = 0;
  for (int r = 0; r < 50; ++r) {
    RngStream rng(7, static_cast<std::uint64_t>(r));
    std::vector<double> obs(3, 0.0);
    for (int k = 0; k < 100000; ++k) obs[rng.below(3)] += 1.0;
    passes += chi_square_validate(obs, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}).pass ? 1 : 0;
  }
  CHECK(passes >= 49);
  RngStream rng(8, 0);
  std::vector<double> obs(3, 0.0);
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    obs[u < 0.35 ? 0 : (u < 0.35 + 1.0 / 3 ? 1 : 2)] += 1.0;
  }
  CHECK_FALSE(chi_square_validate(obs, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}).pass);
}

TEST_CASE("chi-square merges sparse cells") {
  const std::vector<double> probs{0.98, 0.005, 0.005, 0.005, 0.005};
  const auto r = chi_square_validate(std::vector<double>{98, 1, 0, 1, 0}, probs);
  CHECK(r.dof == 0);
  CHECK(r.pass);
}

TEST_CASE("transition matrix of the integer exchange chain") {
  const auto m = build_transition_matrix(3, 3);
  CHECK(m.size() == 10);
  CHECK(m.max_row_sum_error() <= 1e-12);
  const auto all_zero = build_transition_matrix(0, 4);
  CHECK(all_zero.size() == 1);
  CHECK(all_zero(0, 0) == 1.0);
  CHECK_THROWS_AS(build_transition_matrix(30, 10, 1000), ResourceLimitError);
}

TEST_CASE("stationary law weighs each state by 2^(number of positive parts)") {
  // The share drawn for the first agent of a pair ranges over {0, ..., s-1},
  // so the second agent always keeps at least one unit; detailed balance
  // then holds for pi(x) proportional to 2^#{k : x_k > 0}.
  for (auto [n, agents] : {std::pair<int, int>{3, 3}, {2, 2}, {4, 3}, {3, 4}}) {
    const auto m = build_transition_matrix(n, agents);
    std::vector<double> pi(m.size());
    double z = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      int positive = 0;
      for (auto c : m.states()[i].counts()) positive += c > 0 ? 1 : 0;
      z += (pi[i] = std::ldexp(1.0, positive));
    }
    for (auto& p : pi) p /= z;
    const auto st = stationary_distribution(m);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(st.distribution[i] - pi[i]) <= 1e-10);
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = 0; b < m.size(); ++b) CHECK(std::abs(pi[a] * m(a, b) - pi[b] * m(b, a)) <= 1e-15);
  }
}

TEST_CASE("power iteration on a doubly stochastic matrix gives the uniform law") {
  const auto states = enumerate_states(2, 2);
  const std::vector<double> entries{0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5};
  const TransitionMatrix m(states, entries);
  CHECK(m.max_column_sum_error() <= 1e-15);
  for (double p : stationary_distribution(m).distribution) CHECK(std::abs(p - 1.0 / 3.0) <= 1e-10);
}

TEST_CASE("k-step laws equal matrix powers") {
  const auto m = build_transition_matrix(2, 2);
  const auto one = m.k_step_law(m.index_of(DiscreteWealthState({2, 0})), 1);
  CHECK(one[0] == doctest::Approx(0.25));
  CHECK(one[1] == doctest::Approx(0.5));
  CHECK(one[2] == doctest::Approx(0.25));
  const auto two = m.k_step_law(0, 2);
  std::vector<double> manual(3, 0.0);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) manual[b] += m(0, a) * m(a, b);
  for (std::size_t b = 0; b < 3; ++b) CHECK(two[b] == doctest::Approx(manual[b]));
}

TEST_CASE("stationary iteration reports non-convergence") {
  const auto m = build_transition_matrix(3, 3);
  CHECK_THROWS_AS(stationary_distribution(m, 1e-13, 2), ConvergenceError);
}

TEST_CASE("rng variates") {
  RngStream a(1, 2), b(1, 2);
  for (int k = 0; k < 10; ++k) CHECK(a.next_u64() == b.next_u64());
  RngStream rng(5, 5);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
  double gsum = 0.0;
  for (int k = 0; k < 100000; ++k) gsum += static_cast<double>(rng.geometric(0.25));
  CHECK(gsum / 100000.0 == doctest::Approx(3.0).epsilon(0.03));
  CHECK(rng.geometric(1.0) == 0);
  for (int k = 0; k < 1000; ++k) CHECK(rng.below(7) < 7);
}
