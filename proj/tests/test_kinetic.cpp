#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "exkin/errors.hpp"
#include "exkin/kinetic.hpp"
#include "exkin/rng.hpp"

using namespace exkin;

namespace {

constexpr double kInf = kUnboundedWealth;

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

}  // namespace

TEST_CASE("gridded density basics") {
  const auto u = make_density("uniform:0:2", 4.0, 400);
  CHECK(u.mass() == doctest::Approx(1.0));
  CHECK(u.first_moment() == doctest::Approx(1.0));
  CHECK(u.cdf(1.0) == doctest::Approx(0.5));
  CHECK(u.quantile(0.25) == doctest::Approx(0.5));
  CHECK(u.cdf_integral(2.0) == doctest::Approx(1.0));
  CHECK(u.cdf_integral(3.0) == doctest::Approx(2.0));
  CHECK_THROWS(GriddedDensity(1.0, {0.5, -0.1}));
  CHECK_THROWS_AS(make_density("banana", 1.0, 10), ConfigError);
  CHECK_THROWS_AS(make_density("uniform:0", 1.0, 10), ConfigError);
}

TEST_CASE("self convolution") {
  const auto u = make_density("uniform:0:1", 1.0, 1000);
  const auto tri = self_convolve(u);
  CHECK(tri.values.size() == 2000);
  CHECK(tri.x_max == 2.0);
  const double peak = *std::max_element(tri.values.begin(), tri.values.end());
  CHECK(peak == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(tri.values[500] == doctest::Approx(0.5).epsilon(2e-3));

  const auto e = equilibrium_density(1.0, kInf, 30.0, 3000);
  const auto gam = self_convolve(e);
  const double dx = e.dx();
  double worst = 0.0;
  for (std::size_t j = 1; j < gam.values.size(); ++j) {
    const double s = (static_cast<double>(j) + 0.5) * gam.dx();
    if (s < dx || s > 15.0) continue;
    worst = std::max(worst, std::abs(gam.values[j] - s * std::exp(-s)) / (s * std::exp(-s)));
  }
  CHECK(worst <= 2.0 * dx);

  RngStream rng(1, 0);
  for (int r = 0; r < 20; ++r) {
    std::vector<double> v(200);
    for (auto& x : v) x = rng.uniform();
    double mass = 0.0;
    for (double x : v) mass += x * 0.05;
    for (auto& x : v) x /= mass;
    CHECK(self_convolve(GriddedDensity(10.0, v)).integral() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("exponential laws are equilibria") {
  for (double m : {0.5, 1.0, 2.0}) {
    const auto f = equilibrium_density(m, kInf, 30.0, 3000);
    const auto q = qbar_apply(f, kInf);
    const std::vector<double> inner(q.begin(), q.begin() + 2400);
    CHECK(sup_abs(inner) <= 5e-3);
    CHECK(sup_abs(q) <= 5e-3);
    const auto t = equilibrium_density(m, 1.0, 1.0, 3000);
    CHECK(sup_abs(qbar_apply(t, 1.0)) <= 5e-3);
  }
}

TEST_CASE("collision operator conserves mass and wealth") {
  for (const char* spec : {"exponential:1", "uniform:0:2", "geometric:0.5", "truncated_exponential:2:3"}) {
    const auto f = make_density(spec, 30.0, 600);
    const auto q = qbar_apply(f, kInf);
    GriddedFunction g{30.0, q};
    CHECK(std::abs(g.integral()) <= 1e-6);
    CHECK(std::abs(g.first_moment()) <= 1e-6);
  }
  const auto f = make_density("truncated_exponential:1:1", 1.0, 500);
  GriddedFunction g{1.0, qbar_apply(f, 1.0)};
  CHECK(std::abs(g.integral()) <= 1e-6);
  CHECK(std::abs(g.first_moment()) <= 1e-6);
}

TEST_CASE("support beyond the wealth cap is rejected") {
  const auto f = make_density("exponential:1", 10.0, 100);
  CHECK_THROWS_AS(qbar_apply(f, 2.0), std::domain_error);
  CHECK_THROWS_AS(qbar_apply_direct(make_density("exponential:1", 10.0, 500), kInf), ResourceLimitError);
}

TEST_CASE("spike at zero is stationary in the weak sense") {
  const auto f = make_density("spike", 10.0, 500);
  const auto q = qbar_apply(f, kInf);
  GriddedFunction g{10.0, q};
  CHECK(std::abs(g.integral()) <= 1e-12);
  for (std::size_t k = 2; k < q.size(); ++k) REQUIRE(q[k] == 0.0);
  // Testing against bounded Lipschitz functions gives O(dx).
  for (const auto& tf : {TestFunction::exponential(), TestFunction::smoothed_indicator(0.0, 1.0, 0.5)})
    CHECK(std::abs(weak_pairing(tf, q, f.dx())) <= 10.0 * f.dx());
  // The atomic measure delta_0 itself is exactly invariant.
  const std::vector<double> atom{0.0}, weight{1.0};
  CHECK(q_bracket(TestFunction::exponential(), atom, weight, kInf) == 0.0);
  CHECK(q_bracket(TestFunction::smoothed_indicator(0.2, 0.4), atom, weight, kInf) == 0.0);
}

TEST_CASE("gain at the origin") {
  // For Uniform[0,2]: 2 int_0^4 (f*f)(s)/s ds = 2 ln 2.
  const auto u = make_density("uniform:0:2", 8.0, 4000);
  const double expected = 2.0 * std::log(2.0);
  CHECK(gain_point_direct(u, kInf, 1e-9) == doctest::Approx(expected).epsilon(1e-6));
  const CollisionOperator op(u.cells(), u.dx(), kInf);
  const auto t = op.terms(u.values());
  CHECK(std::abs(t.gain[0] - expected) <= 1e-3);
  CHECK(t.gain[0] == doctest::Approx(expected - u.dx() / 4.0).epsilon(1e-9));
}

TEST_CASE("raw gain and loss equal the literal double integral") {
  for (const char* spec : {"exponential:1", "uniform:0:2", "truncated_exponential:1:3", "geometric:0.5", "spike"}) {
    for (double w0 : {kInf, 9.0}) {
      const auto f = make_density(spec, 10.0, 200);
      if (w0 < 10.0 && spec == std::string("exponential:1")) continue;
      if (w0 < 10.0 && spec == std::string("geometric:0.5")) continue;
      const auto t = CollisionOperator(200, f.dx(), w0).terms(f.values());
      std::vector<double> raw(200);
      for (std::size_t k = 0; k < 200; ++k) raw[k] = t.gain[k] - t.loss[k];
      // The oracle's outer Gauss-Legendre rules are not exact near the kink at
      // the origin, which the all-in-one-cell spike stresses most.
      const double tol = spec == std::string("spike") ? 2e-4 : 1e-6;
      CHECK(l1(raw, qbar_apply_direct(f, w0)) / sup_abs(t.gain) <= tol);
    }
  }
}

TEST_CASE("projected operator stays close to the literal double integral") {
  // The projection moves cell values by O(dx^2); densities are chosen with
  // negligible mass pushed past x_max.
  for (const char* spec : {"exponential:1", "uniform:0:2", "truncated_exponential:1:3", "exponential:0.5",
                           "uniform:1:3"}) {
    const auto f = make_density(spec, 10.0, 200);
    const auto a = qbar_apply(f, kInf);
    const auto b = qbar_apply_direct(f, kInf);
    const auto t = CollisionOperator(200, f.dx(), kInf).terms(f.values());
    double scale = 0.0;
    for (double v : t.gain) scale += std::abs(v);
    CHECK(l1(a, b) / scale <= 1e-3);
  }
}

TEST_CASE("symmetrized and split-average brackets coincide") {
  RngStream rng(2, 0);
  std::vector<double> atoms(30), weights(30);
  for (auto& a : atoms) a = 3.0 * rng.uniform();
  for (auto& w : weights) w = rng.uniform() / 15.0;
  for (const auto& g : {TestFunction::exponential(), TestFunction::capped_power(2.0, 2),
                        TestFunction::smoothed_indicator(0.5, 1.0, 0.1)}) {
    CHECK(q_bracket(g, atoms, weights, 4.0) ==
          doctest::Approx(q_bracket_symmetrized(g, atoms, weights, 4.0)).epsilon(1e-12));
  }
}

TEST_CASE("weak and strong forms agree") {
  const std::vector<TestFunction> fns{TestFunction::exponential(), TestFunction::exponential(0.3),
                                      TestFunction::capped_power(3.0, 1), TestFunction::capped_power(2.0, 2),
                                      TestFunction::smoothed_indicator(0.5, 1.5, 0.25)};
  for (const char* spec : {"exponential:1", "uniform:0:2", "truncated_exponential:2:4", "geometric:0.4",
                           "exponential:0.5"}) {
    const auto f = make_density(spec, 20.0, 2000);
    const auto q = qbar_apply(f, kInf);
    for (const auto& g : fns) {
      const double strong = weak_pairing(g, q, f.dx());
      const double weak = q_bracket(g, f, kInf);
      CHECK(std::abs(strong - weak) <= 1e-3);
    }
  }
}

TEST_CASE("equilibrium family limits") {
  const auto flat = equilibrium_density(1e3, 1.0, 1.0, 1000);
  double worst = 0.0;
  for (double v : flat.values()) worst = std::max(worst, std::abs(v - 1.0));
  CHECK(worst <= 1e-3);
  CHECK_THROWS(equilibrium_density(-1.0, kInf, 10.0, 10));
  CHECK_THROWS(equilibrium_density(1.0, 5.0, 4.0, 10));
}

TEST_CASE("exponential start is preserved by time stepping") {
  KineticRunConfig c;
  c.horizon = 10.0;
  c.cells = 1500;
  c.initial = "exponential:1";
  const auto sol = kinetic_solve(c);
  REQUIRE(sol.snapshots.size() == 11);
  CHECK(sol.snapshots.back().time == 10.0);
  const auto& f0 = sol.snapshots.front().density;
  const auto& fT = sol.snapshots.back().density;
  CHECK(wasserstein1(f0, fT, 30.0) <= 1e-3);
  CHECK(sol.max_clipped_per_step == 0.0);
}

TEST_CASE("relaxation from a uniform start") {
  KineticRunConfig c;
  c.horizon = 6.0;
  c.cells = 1500;
  c.initial = "uniform:0:2";
  c.snapshot_interval = 0.5;
  const auto sol = kinetic_solve(c);
  const ExponentialDistribution target(1.0);
  double previous = 1e9;
  for (const auto& s : sol.snapshots) {
    const double w = wasserstein1(s.density, target, 60.0);
    CHECK(w < previous);
    previous = w;
    CHECK(std::abs(s.density.first_moment() - 1.0) <= 1e-4);
  }
}

TEST_CASE("run configuration validation") {
  KineticRunConfig c;
  c.dt = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.dt = 0.05;
  c.w0 = 40.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.w0 = kInf;
  c.cells = 100;
  CHECK_THROWS_AS(kinetic_solve(c, make_density("exponential:1", 30.0, 200)), ConfigError);
}

TEST_CASE("clipping above the threshold aborts the run") {
  KineticRunConfig c;
  c.horizon = 1.0;
  c.dt = 0.25;
  c.cells = 300;
  c.x_max = 10.0;
  c.initial = "uniform:0:0.1";
  c.integrator = Integrator::euler;
  c.max_clip_per_step = 0.0;
  CHECK_THROWS_AS(kinetic_solve(c), InstabilityError);
}

TEST_CASE("Laplace transform probe") {
  const std::vector<double> ts{0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  for (double m : {0.5, 1.0, 2.0}) {
    const auto rep = laplace_check(equilibrium_density(m, kInf, 40.0 * m, 4000), ts);
    CHECK(rep.fitted_mean == doctest::Approx(m).epsilon(1e-3));
    CHECK(rep.max_deviation <= 1e-3);
  }
  const auto uni = laplace_check(make_density("uniform:0:2", 10.0, 1000), ts);
  CHECK(uni.max_deviation > 0.01);
}
