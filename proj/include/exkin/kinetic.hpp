#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "exkin/measures.hpp"
#include "exkin/stats.hpp"
#include "exkin/test_function.hpp"

namespace exkin {

inline constexpr double kUnboundedWealth = std::numeric_limits<double>::infinity();

// Piecewise-constant probability density on [0, x_max] with M uniform cells.
// values[k] is the density on cell k (centre (k + 1/2) dx).
class GriddedDensity final : public Distribution {
 public:
  GriddedDensity(double x_max, std::vector<double> values);

  // Samples `density` at cell centres; optionally rescales to mass 1.
  static GriddedDensity from_function(double x_max, std::size_t cells, const std::function<double(double)>& density,
                                      bool normalize = true);

  std::size_t cells() const { return values_.size(); }
  double x_max() const { return x_max_; }
  double dx() const { return x_max_ / static_cast<double>(values_.size()); }
  double center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dx(); }
  std::span<const double> values() const { return values_; }

  double mass() const;
  // int x f(x) dx (exact for the piecewise-constant density).
  double first_moment() const;

  double cdf(double x) const override;
  double quantile(double q) const override;
  double cdf_integral(double x) const override;
  double mean() const override { return first_moment(); }

 private:
  double x_max_;
  std::vector<double> values_;
  std::vector<double> cumulative_;           // mass left of node k
  std::vector<double> cumulative_integral_;  // int_0^{node k} F
};

// Signed values on a uniform grid (convolutions, collision-operator output).
struct GriddedFunction {
  double x_max = 0.0;
  std::vector<double> values;

  double dx() const { return x_max / static_cast<double>(values.size()); }
  double integral() const;
  double first_moment() const;  // midpoint rule
};

// (f * f)(s) = int_0^s f(y) f(s - y) dy by the midpoint rule, reported at the
// cell centres of [0, 2 x_max] with 2M cells.
GriddedFunction self_convolve(const GriddedDensity& f);

// Discrete collision operator of the density form of the kinetic equation.
//
// Each pair of cells (k, l) is treated exactly for the piecewise-constant
// density: the pooled wealth u dx of two uniform points in the cells has a
// triangular law on [j, j+2] (j = k + l), pairs interact while u dx <= w0,
// and each product is uniform on [0, u dx]. Cell weights for this
// redistribution are tabulated once per grid. The result is then projected
// so that mass and the midpoint first moment are conserved exactly, by
// adding (alpha + beta x) times the gain term.
class CollisionOperator {
 public:
  CollisionOperator(std::size_t cells, double dx, double w0);

  std::size_t cells() const { return cells_; }
  double dx() const { return dx_; }
  double w0() const { return w0_; }

  struct Terms {
    std::vector<double> gain;
    std::vector<double> loss;
    double gain_beyond_grid = 0.0;  // mass rate produced past x_max (truncation leakage)
  };

  // Raw gain and loss densities before the conservation projection.
  Terms terms(std::span<const double> f) const;
  // gain - loss, conservation-projected.
  std::vector<double> apply(std::span<const double> f) const;

 private:
  std::size_t cells_;
  double dx_;
  double w0_;
  // Per pooled-index j in [0, 2M-2]: weight of each cell below j, of cell j,
  // of cell j+1, and the interaction probability.
  std::vector<double> below_, own_, next_, interact_;
};

// Q-bar_{w0}(f) as conservation-projected cell averages; throws std::domain_error when w0 is finite
// and f has mass in cells lying entirely beyond w0.
std::vector<double> qbar_apply(const GriddedDensity& f, double w0);

// Independent evaluation of the literal double-integral form
//   2 int_{x/w0}^1 int_0^x f(y/r) f((x-y)/r) dy dr/r^2 - 2 f(x) int_0^{(w0-x)+} f,
// with r = 1/v and the inner integral taken exactly between the breakpoints
// of the piecewise-constant density, averaged over each cell by
// Gauss-Legendre. Only for coarse grids (M <= 400).
std::vector<double> qbar_apply_direct(const GriddedDensity& f, double w0);

// Pointwise gain term of the literal form at x > 0.
double gain_point_direct(const GriddedDensity& f, double w0, double x);

inline constexpr std::size_t kDirectOracleCellCap = 400;

// <g, Q(mu)> for an atomic measure sum_k w_k delta_{x_k}: the full double
// sum including i = j, sum_{k,l} w_k w_l 1{x_k + x_l <= w0}
// (2 G(s)/s - g(x_k) - g(x_l)).
double q_bracket(const TestFunction& g, std::span<const double> atoms, std::span<const double> weights, double w0);
double q_bracket(const TestFunction& g, const EmpiricalMeasure& mu, double w0);
// Gridded measure f dx as atoms at the cell centres.
double q_bracket(const TestFunction& g, const GriddedDensity& f, double w0);
// Same bracket with the split average written as the symmetrized form
// int_0^1 2 g(r s) dr; identical by construction of G.
double q_bracket_symmetrized(const TestFunction& g, std::span<const double> atoms, std::span<const double> weights,
                             double w0);

// <g, q> for a piecewise-constant signed function, exact through G.
double weak_pairing(const TestFunction& g, std::span<const double> values, double dx);

// e^{-x/m}/m for w0 = inf; e^{-x/m} / (m (1 - e^{-w0/m})) on [0, w0] otherwise,
// sampled at cell centres and renormalized to mass 1.
GriddedDensity equilibrium_density(double m, double w0, double x_max, std::size_t cells);

// Named initial densities: "exponential:m", "uniform:a:b",
// "truncated_exponential:m:w0", "geometric:p" (mass p(1-p)^k on [k, k+1)),
// "spike" (all mass in the first cell).
GriddedDensity make_density(const std::string& spec, double x_max, std::size_t cells);

enum class Integrator { rk4, euler };

struct KineticRunConfig {
  double w0 = kUnboundedWealth;
  double horizon = 10.0;
  double dt = 0.05;
  double x_max = 30.0;
  std::size_t cells = 3000;
  std::string initial = "exponential:1";
  double snapshot_interval = 1.0;
  Integrator integrator = Integrator::rk4;
  // Per-step clipped-mass threshold that aborts the run.
  double max_clip_per_step = 1e-4;

  void validate() const;
};

struct KineticSnapshot {
  double time = 0.0;
  GriddedDensity density;
};

struct KineticSolution {
  std::vector<KineticSnapshot> snapshots;
  double clipped_mass_total = 0.0;
  double max_clipped_per_step = 0.0;
  double leaked_mass_total = 0.0;
  std::size_t steps = 0;
};

// Explicit time stepping of f_t = f_0 + int_0^t Q-bar(f_s) ds. After each
// step negative values are clipped and the mass renormalized to 1; a step
// clipping more than max_clip_per_step raises InstabilityError.
KineticSolution kinetic_solve(const KineticRunConfig& config);
KineticSolution kinetic_solve(const KineticRunConfig& config, const GriddedDensity& initial);

struct LaplaceReport {
  std::vector<double> t_grid;
  std::vector<double> transform;
  double fitted_mean = 0.0;  // m from f(1) = 1 / (1 + m)
  double max_deviation = 0.0;
};

// Laplace transform of f on t_grid, the exponential-family fit at t = 1 and
// the largest deviation from 1/(1 + m t).
LaplaceReport laplace_check(const GriddedDensity& f, std::span<const double> t_grid);

}  // namespace exkin
