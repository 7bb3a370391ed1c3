#include "exkin/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "exkin/errors.hpp"
#include "exkin/format.hpp"
#include "gauss_legendre.hpp"

namespace exkin {

// ---------------------------------------------------------------------------
// GriddedDensity

GriddedDensity::GriddedDensity(double x_max, std::vector<double> values) : x_max_(x_max), values_(std::move(values)) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw std::domain_error("x_max must be positive and finite");
  if (values_.empty()) throw std::invalid_argument("density needs at least one cell");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error("density values must be finite and nonnegative");
  const double h = dx();
  cumulative_.assign(values_.size() + 1, 0.0);
  cumulative_integral_.assign(values_.size() + 1, 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    cumulative_[k + 1] = cumulative_[k] + values_[k] * h;
    // F is linear on the cell: int = h (F_k + F_{k+1}) / 2
    cumulative_integral_[k + 1] = cumulative_integral_[k] + 0.5 * h * (cumulative_[k] + cumulative_[k + 1]);
  }
}

GriddedDensity GriddedDensity::from_function(double x_max, std::size_t cells,
                                             const std::function<double(double)>& density, bool normalize) {
  if (cells == 0) throw std::invalid_argument("grid needs at least one cell");
  const double h = x_max / static_cast<double>(cells);
  std::vector<double> v(cells);
  for (std::size_t k = 0; k < cells; ++k) v[k] = density((static_cast<double>(k) + 0.5) * h);
  if (normalize) {
    const double mass = std::accumulate(v.begin(), v.end(), 0.0) * h;
    if (!(mass > 0.0)) throw std::domain_error("cannot normalize a density with zero mass");
    for (auto& x : v) x /= mass;
  }
  return GriddedDensity(x_max, std::move(v));
}

double GriddedDensity::mass() const { return cumulative_.back(); }

double GriddedDensity::first_moment() const {
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s += center(k) * values_[k];
  return s * dx();
}

double GriddedDensity::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= x_max_) return cumulative_.back();
  const double pos = x / dx();
  const auto k = std::min(static_cast<std::size_t>(pos), values_.size() - 1);
  return cumulative_[k] + (pos - static_cast<double>(k)) * dx() * values_[k];
}

double GriddedDensity::quantile(double q) const {
  if (q <= 0.0) return 0.0;
  if (q >= cumulative_.back()) {
    // first node where the mass is exhausted
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), cumulative_.back());
    return static_cast<double>(it - cumulative_.begin()) * dx();
  }
  auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), q);
  const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double frac = values_[k] > 0.0 ? (q - cumulative_[k]) / (values_[k] * dx()) : 0.0;
  return (static_cast<double>(k) + std::clamp(frac, 0.0, 1.0)) * dx();
}

double GriddedDensity::cdf_integral(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= x_max_) return cumulative_integral_.back() + (x - x_max_) * cumulative_.back();
  const double pos = x / dx();
  const auto k = std::min(static_cast<std::size_t>(pos), values_.size() - 1);
  const double t = x - static_cast<double>(k) * dx();
  return cumulative_integral_[k] + t * cumulative_[k] + 0.5 * t * t * values_[k];
}

double GriddedFunction::integral() const { return std::accumulate(values.begin(), values.end(), 0.0) * dx(); }

double GriddedFunction::first_moment() const {
  const double h = dx();
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += (static_cast<double>(k) + 0.5) * h * values[k];
  return s * h;
}

// ---------------------------------------------------------------------------
// Convolution

namespace {

// c_j = sum_{k+l=j} p_k p_l for cell masses p, j in [0, limit].
std::vector<double> pair_masses(std::span<const double> p, std::size_t limit) {
  std::size_t last = p.size();
  while (last > 0 && p[last - 1] == 0.0) --last;
  std::vector<double> c(limit + 1, 0.0);
  if (last == 0) return c;
  const std::size_t top = std::min(limit, 2 * (last - 1));
  for (std::size_t j = 0; j <= top; ++j) {
    const std::size_t lo = j >= last ? j - (last - 1) : 0;
    const std::size_t hi = std::min(j, last - 1);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) s += p[k] * p[j - k];
    c[j] = s;
  }
  return c;
}

std::vector<double> cell_masses(std::span<const double> f, double dx) {
  std::vector<double> p(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) p[k] = f[k] * dx;
  return p;
}

}  // namespace

GriddedFunction self_convolve(const GriddedDensity& f) {
  const std::size_t m = f.cells();
  const double h = f.dx();
  const auto c = pair_masses(cell_masses(f.values(), h), 2 * m - 2);
  // (f*f)((j+1) dx) = c_j / dx by the midpoint rule; cell centres of the
  // doubled grid average the two neighbouring nodes.
  GriddedFunction out{2.0 * f.x_max(), std::vector<double>(2 * m, 0.0)};
  for (std::size_t j = 0; j < 2 * m; ++j) {
    const double left = j >= 1 ? c[j - 1] : 0.0;
    const double right = j < c.size() ? c[j] : 0.0;
    out.values[j] = 0.5 * (left + right) / h;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CollisionOperator

CollisionOperator::CollisionOperator(std::size_t cells, double dx, double w0) : cells_(cells), dx_(dx), w0_(w0) {
  if (cells == 0 || !(dx > 0.0)) throw std::invalid_argument("collision operator needs a nonempty grid");
  if (!(w0 > 0.0)) throw std::domain_error("w0 must be positive");
  const std::size_t count = 2 * cells - 1;
  below_.assign(count, 0.0);
  own_.assign(count, 0.0);
  next_.assign(count, 0.0);
  interact_.assign(count, 0.0);

  static const detail::GaussLegendre rule(12);
  const double cap = std::isinf(w0) ? kUnboundedWealth : w0 / dx;  // in units of dx
  for (std::size_t jj = 0; jj < count; ++jj) {
    const double j = static_cast<double>(jj);
    if (cap <= j) break;
    // Rising half of the triangle on [j, j+1], falling half on [j+1, j+2].
    auto accumulate_piece = [&](double a, double b, bool rising) {
      b = std::min(b, cap);
      if (b <= a) return;
      auto tri = [&](double u) { return rising ? u - j : j + 2.0 - u; };
      below_[jj] += rule.integrate(a, b, [&](double u) { return tri(u) / u; });
      own_[jj] += rule.integrate(a, b, [&](double u) { return tri(u) * (std::min(u, j + 1.0) - j) / u; });
      next_[jj] += rule.integrate(a, b, [&](double u) { return tri(u) * std::max(0.0, u - j - 1.0) / u; });
      interact_[jj] += rule.integrate(a, b, tri);
    };
    accumulate_piece(j, j + 1.0, true);
    accumulate_piece(j + 1.0, j + 2.0, false);
  }
}

CollisionOperator::Terms CollisionOperator::terms(std::span<const double> f) const {
  if (f.size() != cells_) throw std::invalid_argument("density does not match the operator grid");
  const std::size_t m = cells_;
  const auto p = cell_masses(f, dx_);
  const auto c = pair_masses(p, 2 * m - 2);

  Terms t;
  t.gain.assign(m, 0.0);
  t.loss.assign(m, 0.0);

  // Gain mass into cell q: 2 [ sum_{j > q} c_j below_j + c_q own_q + c_{q-1} next_{q-1} ].
  double suffix = 0.0;
  double produced = 0.0;
  for (std::size_t j = 2 * m - 2; j + 1 > 0; --j) {
    produced += 2.0 * c[j] * interact_[j];
    if (j < m) {
      double g = suffix + c[j] * own_[j];
      if (j >= 1) g += c[j - 1] * next_[j - 1];
      t.gain[j] = 2.0 * g / dx_;
    }
    suffix += c[j] * below_[j];
  }
  double kept = 0.0;
  for (double g : t.gain) kept += g * dx_;
  t.gain_beyond_grid = produced - kept;

  const bool unbounded = std::isinf(w0_);
  const double mass = std::accumulate(p.begin(), p.end(), 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    if (p[k] == 0.0) continue;
    double partner = 0.0;
    if (unbounded) {
      partner = mass;
    } else {
      for (std::size_t l = 0; l < m && k + l < interact_.size(); ++l) {
        if (interact_[k + l] == 0.0) break;
        partner += p[l] * interact_[k + l];
      }
    }
    t.loss[k] = 2.0 * f[k] * partner;
  }
  return t;
}

std::vector<double> CollisionOperator::apply(std::span<const double> f) const {
  const auto t = terms(f);
  const std::size_t m = cells_;
  std::vector<double> q(m);
  double d0 = 0.0, d1 = 0.0, g0 = 0.0, g1 = 0.0, g2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double x = (static_cast<double>(k) + 0.5) * dx_;
    q[k] = t.gain[k] - t.loss[k];
    d0 += q[k];
    d1 += x * q[k];
    g0 += t.gain[k];
    g1 += x * t.gain[k];
    g2 += x * x * t.gain[k];
  }
  if (g0 <= 0.0) return q;
  // Solve [g0 g1; g1 g2] (alpha, beta) = -(d0, d1); fall back to a pure mass
  // fix when the gain sits in a single cell.
  double alpha = -d0 / g0, beta = 0.0;
  const double det = g0 * g2 - g1 * g1;
  if (det > 1e-12 * g0 * g2) {
    alpha = (-d0 * g2 + d1 * g1) / det;
    beta = (-d1 * g0 + d0 * g1) / det;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const double x = (static_cast<double>(k) + 0.5) * dx_;
    q[k] += (alpha + beta * x) * t.gain[k];
  }
  return q;
}

namespace {

void check_support(const GriddedDensity& f, double w0) {
  if (std::isinf(w0)) return;
  const double h = f.dx();
  for (std::size_t k = 0; k < f.cells(); ++k) {
    if (static_cast<double>(k) * h >= w0 * (1.0 + 1e-12) && f.values()[k] != 0.0) {
      std::ostringstream msg;
      msg << "density has mass beyond w0 = " << w0 << " (cell " << k << ")";
      throw std::domain_error(msg.str());
    }
  }
}

}  // namespace

std::vector<double> qbar_apply(const GriddedDensity& f, double w0) {
  check_support(f, w0);
  return CollisionOperator(f.cells(), f.dx(), w0).apply(f.values());
}

// ---------------------------------------------------------------------------
// Literal double-integral oracle

namespace {

// int_0^x f(y v) f((x - y) v) dy for the piecewise-constant density, exact:
// the integrand is constant between the breakpoints y = k dx / v and
// y = x - k dx / v.
double inner_integral(std::span<const double> values, double h, double x, double v) {
  const double step = h / v;
  const auto cells = values.size();
  auto density = [&](double z) {
    if (z < 0.0) return 0.0;
    const auto k = static_cast<std::size_t>(z / h);
    return k < cells ? values[k] : 0.0;
  };
  double total = 0.0;
  double y = 0.0;
  std::size_t ka = 1;  // next breakpoint k dx / v
  // next breakpoint of the mirrored family: x - k dx / v, scanned from the largest k
  auto mirrored_count = static_cast<long long>(std::floor(x / step));
  while (y < x) {
    double next = x;
    const double a = static_cast<double>(ka) * step;
    if (a < next) next = a;
    while (mirrored_count >= 0 && x - static_cast<double>(mirrored_count) * step <= y) --mirrored_count;
    if (mirrored_count >= 0) next = std::min(next, x - static_cast<double>(mirrored_count) * step);
    if (next <= y) {
      ++ka;
      continue;
    }
    const double mid = 0.5 * (y + next);
    total += density(mid * v) * density((x - mid) * v) * (next - y);
    y = next;
    if (a <= y) ++ka;
  }
  return total;
}

double gain_point(std::span<const double> values, double h, double w0, double x) {
  static const detail::GaussLegendre rule(3);
  const double support = 2.0 * h * static_cast<double>(values.size());
  const double v_max = std::min(std::isinf(w0) ? kUnboundedWealth : w0 / x, support / x);
  if (v_max <= 1.0) return 0.0;
  // Kinks of v -> int f(yv) f((x-y)v) dy sit where x v is a grid node.
  double total = 0.0;
  double a = 1.0;
  auto k = static_cast<long long>(std::floor(x / h)) + 1;
  while (a < v_max) {
    double b = std::min(v_max, static_cast<double>(k) * h / x);
    ++k;
    if (b <= a) continue;
    total += rule.integrate(a, b, [&](double v) { return inner_integral(values, h, x, v); });
    a = b;
  }
  return 2.0 * total;
}

}  // namespace

double gain_point_direct(const GriddedDensity& f, double w0, double x) {
  if (!(x > 0.0)) throw std::domain_error("gain_point_direct needs x > 0");
  return gain_point(f.values(), f.dx(), w0, x);
}

std::vector<double> qbar_apply_direct(const GriddedDensity& f, double w0) {
  if (f.cells() > kDirectOracleCellCap)
    throw ResourceLimitError("qbar_apply_direct is for coarse grids (M <= 400)");
  check_support(f, w0);
  static const detail::GaussLegendre rule(3);
  const auto values = f.values();
  const double h = f.dx();
  std::vector<double> out(f.cells(), 0.0);
  auto mass_below = [&](double z) {  // int_0^z f, by direct summation
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double lo = static_cast<double>(k) * h;
      if (lo >= z) break;
      s += values[k] * (std::min(z, lo + h) - lo);
    }
    return s;
  };
  for (std::size_t k = 0; k < f.cells(); ++k) {
    const double lo = static_cast<double>(k) * h, hi = lo + h;
    const double gain = rule.integrate(lo, hi, [&](double x) { return gain_point(values, h, w0, x); }) / h;
    const double loss =
        rule.integrate(lo, hi, [&](double x) {
          const double reach = std::isinf(w0) ? kUnboundedWealth : std::max(0.0, w0 - x);
          return 2.0 * values[k] * mass_below(reach);
        }) / h;
    out[k] = gain - loss;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weak form

double q_bracket(const TestFunction& g, std::span<const double> atoms, std::span<const double> weights, double w0) {
  if (atoms.size() != weights.size()) throw std::invalid_argument("atoms and weights differ in size");
  const std::size_t n = atoms.size();
  std::vector<double> gx(n);
  for (std::size_t i = 0; i < n; ++i) gx[i] = g(atoms[i]);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (weights[j] == 0.0) continue;
      const double s = atoms[i] + atoms[j];
      if (s > w0) continue;
      row += weights[j] * (2.0 * g.split_average(s) - gx[i] - gx[j]);
    }
    total += weights[i] * row;
  }
  return total;
}

double q_bracket(const TestFunction& g, const EmpiricalMeasure& mu, double w0) {
  const std::vector<double> weights(mu.size(), mu.weight());
  return q_bracket(g, mu.atoms(), weights, w0);
}

double q_bracket(const TestFunction& g, const GriddedDensity& f, double w0) {
  std::vector<double> atoms(f.cells()), weights(f.cells());
  for (std::size_t k = 0; k < f.cells(); ++k) {
    atoms[k] = f.center(k);
    weights[k] = f.values()[k] * f.dx();
  }
  return q_bracket(g, atoms, weights, w0);
}

double q_bracket_symmetrized(const TestFunction& g, std::span<const double> atoms, std::span<const double> weights,
                             double w0) {
  // int_0^1 [g(rs) + g((1-r)s)] dr = int_0^1 2 g(rs) dr = 2 G(s)/s
  const std::size_t n = atoms.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double s = atoms[i] + atoms[j];
      if (s > w0) continue;
      const double split = s == 0.0 ? 2.0 * g(0.0) : 2.0 * g.antiderivative(s) / s;
      total += weights[i] * weights[j] * (split - g(atoms[i]) - g(atoms[j]));
    }
  return total;
}

double weak_pairing(const TestFunction& g, std::span<const double> values, double dx) {
  double total = 0.0;
  double left = g.antiderivative(0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double right = g.antiderivative(static_cast<double>(k + 1) * dx);
    total += values[k] * (right - left);
    left = right;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Equilibria and named densities

GriddedDensity equilibrium_density(double m, double w0, double x_max, std::size_t cells) {
  if (!(m > 0.0)) throw std::domain_error("equilibrium mean parameter must be positive");
  if (!std::isinf(w0) && x_max < w0) throw std::domain_error("grid must cover [0, w0]");
  return GriddedDensity::from_function(x_max, cells, [&](double x) {
    if (x > w0) return 0.0;
    const double base = std::exp(-x / m) / m;
    return std::isinf(w0) ? base : base / (-std::expm1(-w0 / m));
  });
}

namespace {

std::vector<double> split_spec(const std::string& spec) {
  std::vector<double> params;
  std::size_t pos = spec.find(':');
  while (pos != std::string::npos) {
    const std::size_t next = spec.find(':', pos + 1);
    params.push_back(parse_double(spec.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1)));
    pos = next;
  }
  return params;
}

}  // namespace

GriddedDensity make_density(const std::string& spec, double x_max, std::size_t cells) {
  const std::string name = spec.substr(0, spec.find(':'));
  const auto params = split_spec(spec);
  auto need = [&](std::size_t n) {
    if (params.size() != n) throw ConfigError("density '" + name + "' expects " + std::to_string(n) + " parameter(s)");
  };
  if (name == "exponential") {
    need(1);
    return equilibrium_density(params[0], kUnboundedWealth, x_max, cells);
  }
  if (name == "truncated_exponential") {
    need(2);
    return equilibrium_density(params[0], params[1], x_max, cells);
  }
  if (name == "uniform") {
    need(2);
    const double a = params[0], b = params[1];
    if (!(b > a && a >= 0.0 && b <= x_max)) throw ConfigError("uniform density needs 0 <= a < b <= x_max");
    return GriddedDensity::from_function(x_max, cells, [&](double x) { return x >= a && x <= b ? 1.0 : 0.0; });
  }
  if (name == "geometric") {
    need(1);
    const double p = params[0];
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("geometric density needs 0 < p < 1");
    return GriddedDensity::from_function(x_max, cells, [&](double x) { return p * std::pow(1.0 - p, std::floor(x)); });
  }
  if (name == "spike") {
    need(0);
    std::vector<double> v(cells, 0.0);
    v[0] = static_cast<double>(cells) / x_max;
    return GriddedDensity(x_max, std::move(v));
  }
  throw ConfigError("unknown initial density: " + spec);
}

// ---------------------------------------------------------------------------
// Time stepping

void KineticRunConfig::validate() const {
  if (!(w0 > 0.0)) throw ConfigError("w0 must be positive (or inf)");
  if (!(horizon >= 0.0)) throw ConfigError("horizon must be >= 0");
  if (!(dt > 0.0 && dt <= 0.25)) throw ConfigError("dt must lie in (0, 0.25] for the explicit scheme");
  if (!(x_max > 0.0) || cells == 0) throw ConfigError("grid needs x_max > 0 and cells > 0");
  if (!std::isinf(w0) && x_max < w0) throw ConfigError("x_max must be >= w0 when w0 is finite");
  if (!(snapshot_interval >= 0.0)) throw ConfigError("snapshot interval must be >= 0");
}

KineticSolution kinetic_solve(const KineticRunConfig& config) {
  config.validate();
  return kinetic_solve(config, make_density(config.initial, config.x_max, config.cells));
}

KineticSolution kinetic_solve(const KineticRunConfig& config, const GriddedDensity& initial) {
  config.validate();
  if (initial.cells() != config.cells || std::abs(initial.x_max() - config.x_max) > 1e-12 * config.x_max)
    throw ConfigError("initial density grid does not match the run configuration");
  check_support(initial, config.w0);

  const CollisionOperator op(config.cells, initial.dx(), config.w0);
  const double h = initial.dx();
  const std::size_t m = config.cells;
  std::vector<double> f(initial.values().begin(), initial.values().end());

  KineticSolution sol;
  sol.snapshots.push_back({0.0, initial});
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(config.horizon / config.dt - 1e-9)));
  double next_snapshot = config.snapshot_interval > 0.0 ? config.snapshot_interval : config.horizon;

  std::vector<double> stage(m);
  auto axpy = [&](const std::vector<double>& base, double a, const std::vector<double>& dir) {
    for (std::size_t k = 0; k < m; ++k) stage[k] = base[k] + a * dir[k];
    return std::span<const double>(stage);
  };

  double t = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double step = std::min(config.dt, config.horizon - t);
    sol.leaked_mass_total += op.terms(f).gain_beyond_grid * step;
    if (config.integrator == Integrator::euler) {
      const auto k1 = op.apply(f);
      for (std::size_t k = 0; k < m; ++k) f[k] += step * k1[k];
    } else {
      const auto k1 = op.apply(f);
      const auto k2 = op.apply(axpy(f, 0.5 * step, k1));
      const auto k3 = op.apply(axpy(f, 0.5 * step, k2));
      const auto k4 = op.apply(axpy(f, step, k3));
      for (std::size_t k = 0; k < m; ++k) f[k] += step / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    t = s + 1 == steps ? config.horizon : t + step;

    double clipped = 0.0, mass = 0.0;
    for (auto& v : f) {
      if (v < 0.0) {
        clipped -= v * h;
        v = 0.0;
      }
      mass += v * h;
    }
    sol.clipped_mass_total += clipped;
    sol.max_clipped_per_step = std::max(sol.max_clipped_per_step, clipped);
    if (clipped > config.max_clip_per_step) {
      std::ostringstream msg;
      msg << "step at t=" << t << " clipped mass " << clipped << " > " << config.max_clip_per_step
          << "; use a smaller dt or a finer grid";
      throw InstabilityError(msg.str());
    }
    if (mass > 0.0)
      for (auto& v : f) v /= mass;
    ++sol.steps;

    if (t >= next_snapshot - 0.5 * step || s + 1 == steps) {
      if (s + 1 == steps || next_snapshot < config.horizon - 0.5 * step) sol.snapshots.push_back({t, GriddedDensity(config.x_max, f)});
      while (next_snapshot <= t + 0.5 * step) next_snapshot += config.snapshot_interval > 0.0 ? config.snapshot_interval : config.horizon;
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Laplace transform

LaplaceReport laplace_check(const GriddedDensity& f, std::span<const double> t_grid) {
  auto transform = [&](double t) {
    const double h = f.dx();
    double s = 0.0;
    const double cell_factor = t == 0.0 ? h : -std::expm1(-t * h) / t;
    for (std::size_t k = 0; k < f.cells(); ++k) s += f.values()[k] * std::exp(-t * static_cast<double>(k) * h);
    return s * cell_factor;
  };
  LaplaceReport rep;
  rep.t_grid.assign(t_grid.begin(), t_grid.end());
  const double at_one = transform(1.0);
  rep.fitted_mean = 1.0 / at_one - 1.0;
  for (double t : t_grid) {
    const double value = transform(t);
    rep.transform.push_back(value);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(value - 1.0 / (1.0 + rep.fitted_mean * t)));
  }
  return rep;
}

}  // namespace exkin
