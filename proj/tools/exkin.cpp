// Command-line driver: one subcommand per experiment, CSV/JSON artifacts
// under --out plus a run.json manifest.
#include <CLI11.hpp>
#include <json.hpp>

#include <boost/version.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "exkin/chains.hpp"
#include "exkin/errors.hpp"
#include "exkin/format.hpp"
#include "exkin/io.hpp"
#include "exkin/kinetic.hpp"
#include "exkin/measures.hpp"
#include "exkin/partitions.hpp"
#include "exkin/stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace exkin;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// A finite double or the literal "inf"; stored as text so the manifest keeps
// exactly what was asked for.
struct Real {
  std::string text;
  double value() const { return parse_double(text); }
};

std::istream& operator>>(std::istream& in, Real& r) { return in >> r.text; }

struct Common {
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string out = "out";
  std::string config;
};

struct RunContext {
  std::string subcommand;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  fs::path out;
};

std::uint64_t require_seed(const RunContext& ctx) {
  if (!ctx.seed) throw ConfigError("a seed is required: pass --seed or set EXKIN_SEED");
  return *ctx.seed;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Doubles in reports: finite values as numbers, infinities as strings.
json jnum(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

ContinuousWealthState initial_population(const std::string& kind, std::size_t agents, double total, RngStream& rng) {
  if (kind == "uniform_simplex") {
    const auto s = sample_uniform_simplex(agents, rng);
    std::vector<double> w(s.wealth().begin(), s.wealth().end());
    for (auto& v : w) v *= total / static_cast<double>(agents);
    return ContinuousWealthState(std::move(w), total);
  }
  if (kind == "iid_uniform") {
    std::vector<double> w(agents);
    double sum = 0.0;
    for (auto& v : w) sum += (v = 2.0 * rng.uniform());
    for (auto& v : w) v *= total / sum;
    return ContinuousWealthState(std::move(w), total);
  }
  if (kind == "equal") return ContinuousWealthState(std::vector<double>(agents, total / static_cast<double>(agents)), total);
  if (kind == "concentrated") {
    std::vector<double> w(agents, 0.0);
    w[0] = total;
    return ContinuousWealthState(std::move(w), total);
  }
  throw ConfigError("unknown initial population '" + kind + "' (uniform_simplex, iid_uniform, equal, concentrated)");
}

ContinuousWealthState load_or_build(const std::string& file, const std::string& kind, std::size_t agents, double total,
                                    RngStream& rng) {
  if (file.empty()) return initial_population(kind, agents, total, rng);
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read initial state " + file);
  return read_state_csv(in);
}

void print_check(const std::string& label, double statistic, double threshold, bool pass) {
  std::cout << label << ": statistic=" << format_double(statistic) << " threshold=" << format_double(threshold)
            << " -> " << (pass ? "pass" : "fail") << "\n";
}

TestFunction parse_test_function(const std::string& spec) {
  if (spec == "exp") return TestFunction::exponential(1.0);
  if (spec.rfind("exp:", 0) == 0) return TestFunction::exponential(parse_double(spec.substr(4)));
  if (spec == "one") return TestFunction::constant();
  if (spec == "x") return TestFunction::capped_power(kUnboundedWealth, 1);
  throw ConfigError("unknown test function '" + spec + "' (exp, exp:<rate>, one, x)");
}

// Rewrites flat config entries as leading --key=value arguments so that
// command-line flags, parsed later, take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto cfg = read_flat_config(path);
  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg) {
    if (key == "subcommand" || key == "config") continue;
    injected.push_back("--" + key + "=" + value);
  }
  // The subcommand comes first; the file may supply it when omitted.
  if (args.empty() || args.front().rfind("-", 0) == 0) {
    const auto sub = cfg.find("subcommand");
    if (sub == cfg.end()) throw ConfigError("no subcommand given on the command line or in " + path);
    args.insert(args.begin(), sub->second);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exkin: binary wealth-exchange simulations, kinetic solver and oracles", "exkin"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  auto add_common = [&](CLI::App* sub, bool randomized) {
    sub->add_option("--config", common.config, "flat key=value file; flags override it");
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    if (randomized) {
      sub->add_option("--seed", common.seed, "random seed (required; EXKIN_SEED overrides)");
      sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    }
  };

  RunContext ctx;
  std::function<int(RunContext&)> action;
  auto record = [&](const std::string& key, const auto& value) { ctx.config[key] = value; };

  // simulate-dsdt -------------------------------------------------------------
  struct {
    std::int64_t n = 10, agents = 5;
    std::size_t steps = 100, every = 10;
    std::string initial_file;
  } dsdt;
  {
    auto* sub = app.add_subcommand("simulate-dsdt", "integer exchange chain on compositions of n into N parts");
    add_common(sub, true);
    sub->add_option("--n", dsdt.n, "total units")->capture_default_str();
    sub->add_option("--N", dsdt.agents, "agents")->capture_default_str();
    sub->add_option("--steps", dsdt.steps, "steps")->capture_default_str();
    sub->add_option("--snapshot-every", dsdt.every, "snapshot cadence in steps (0: first and last only)")
        ->capture_default_str();
    sub->add_option("--initial-file", dsdt.initial_file, "state CSV in units (default: all units on agent 0)");
    sub->callback([&] {
      action = [&](RunContext& c) {
        record("n", dsdt.n);
        record("N", dsdt.agents);
        record("steps", dsdt.steps);
        record("snapshot_every", dsdt.every);
        record("initial_file", dsdt.initial_file);
        RngStream rng(require_seed(c), 0);
        std::vector<std::int64_t> counts(static_cast<std::size_t>(dsdt.agents), 0);
        if (!dsdt.initial_file.empty()) {
          std::ifstream in(dsdt.initial_file);
          if (!in) throw ConfigError("cannot read " + dsdt.initial_file);
          const auto s = read_state_csv(in);
          counts.assign(s.agents(), 0);
          for (std::size_t i = 0; i < s.agents(); ++i) counts[i] = std::llround(s[i]);
        } else {
          counts[0] = dsdt.n;
        }
        DiscreteWealthState state(counts);
        std::vector<Snapshot> snaps;
        auto snap = [&](std::size_t step) {
          Snapshot s{static_cast<double>(step), {}};
          for (auto v : state.counts()) s.wealth.push_back(static_cast<double>(v));
          snaps.push_back(std::move(s));
        };
        snap(0);
        for (std::size_t k = 1; k <= dsdt.steps; ++k) {
          state = dsdt_step(state, rng);
          if ((dsdt.every > 0 && k % dsdt.every == 0) || k == dsdt.steps) {
            if (snaps.back().time != static_cast<double>(k)) snap(k);
          }
        }
        write_snapshots_csv(c.out / "snapshots.csv", snaps);
        write_text(c.out / "final_state.csv", [&] {
          std::ostringstream o;
          std::vector<double> w;
          for (auto v : state.counts()) w.push_back(static_cast<double>(v));
          write_state_csv(o, ContinuousWealthState(w));
          return o.str();
        }());
        std::cout << "simulate-dsdt: " << dsdt.steps << " steps, total " << state.total() << " conserved\n";
        return 0;
      };
    });
  }

  // simulate-csdt -------------------------------------------------------------
  struct {
    std::size_t agents = 100, steps = 1000, every = 100;
    Real total{"0"};
    std::string initial = "uniform_simplex", initial_file;
  } csdt;
  {
    auto* sub = app.add_subcommand("simulate-csdt", "continuous exchange chain, one pair per step");
    add_common(sub, true);
    sub->add_option("--N", csdt.agents, "agents")->capture_default_str();
    sub->add_option("--steps", csdt.steps, "steps")->capture_default_str();
    sub->add_option("--snapshot-every", csdt.every, "snapshot cadence in steps")->capture_default_str();
    sub->add_option("--total", csdt.total, "total wealth W_N (0: N)");
    sub->add_option("--initial", csdt.initial, "uniform_simplex | iid_uniform | equal | concentrated")
        ->capture_default_str();
    sub->add_option("--initial-file", csdt.initial_file, "state CSV (overrides --initial)");
    sub->callback([&] {
      action = [&](RunContext& c) {
        const double total = csdt.total.value() > 0.0 ? csdt.total.value() : static_cast<double>(csdt.agents);
        record("N", csdt.agents);
        record("steps", csdt.steps);
        record("snapshot_every", csdt.every);
        record("total", format_double(total));
        record("initial", csdt.initial);
        record("initial_file", csdt.initial_file);
        RngStream rng(require_seed(c), 0);
        auto state = load_or_build(csdt.initial_file, csdt.initial, csdt.agents, total, rng);
        std::vector<Snapshot> snaps{{0.0, {state.wealth().begin(), state.wealth().end()}}};
        for (std::size_t k = 1; k <= csdt.steps; ++k) {
          state = csdt_step(state, rng);
          if ((csdt.every > 0 && k % csdt.every == 0) || k == csdt.steps)
            if (snaps.back().time != static_cast<double>(k))
              snaps.push_back({static_cast<double>(k), {state.wealth().begin(), state.wealth().end()}});
        }
        write_snapshots_csv(c.out / "snapshots.csv", snaps);
        std::cout << "simulate-csdt: " << csdt.steps << " steps, " << snaps.size() << " snapshots\n";
        return 0;
      };
    });
  }

  // simulate-poisson ----------------------------------------------------------
  struct {
    std::size_t agents = 100;
    Real horizon{"5"}, total{"0"}, interval{"1"};
    std::string initial = "uniform_simplex", initial_file, g;
  } poisson;
  {
    auto* sub = app.add_subcommand("simulate-poisson", "Poissonized continuous-time chain with event log");
    add_common(sub, true);
    sub->add_option("--N", poisson.agents, "agents")->capture_default_str();
    sub->add_option("--T", poisson.horizon, "horizon");
    sub->add_option("--total", poisson.total, "total wealth W_N (0: N)");
    sub->add_option("--snapshot-interval", poisson.interval, "snapshot spacing in time (0: ends only)");
    sub->add_option("--initial", poisson.initial, "uniform_simplex | iid_uniform | equal | concentrated")
        ->capture_default_str();
    sub->add_option("--initial-file", poisson.initial_file, "state CSV (overrides --initial)");
    sub->add_option("--g", poisson.g, "also write the martingale path for this test function (exp, exp:<r>, one, x)");
    sub->callback([&] {
      action = [&](RunContext& c) {
        const double total = poisson.total.value() > 0.0 ? poisson.total.value() : static_cast<double>(poisson.agents);
        record("N", poisson.agents);
        record("T", poisson.horizon.text);
        record("total", format_double(total));
        record("snapshot_interval", poisson.interval.text);
        record("initial", poisson.initial);
        record("initial_file", poisson.initial_file);
        record("g", poisson.g);
        RngStream rng(require_seed(c), 0);
        const auto start = load_or_build(poisson.initial_file, poisson.initial, poisson.agents, total, rng);
        const auto traj = poisson_simulate(start, {poisson.horizon.value(), poisson.interval.value()}, rng);
        write_events_csv(c.out / "events.csv", traj);
        write_snapshots_csv(c.out / "snapshots.csv", traj.snapshots);
        if (!poisson.g.empty()) {
          const auto g = parse_test_function(poisson.g);
          write_martingale_csv(c.out / "martingale.csv", martingale_residual(traj, g, start.total() * (1 + 1e-9)));
        }
        std::cout << "simulate-poisson: " << traj.events.size() << " jumps on [0, " << poisson.horizon.text << "]\n";
        return 0;
      };
    });
  }

  // couple --------------------------------------------------------------------
  struct {
    std::int64_t n = 10000;
    std::size_t k = 100, agents = 5;
  } couple;
  {
    auto* sub = app.add_subcommand("couple", "coupled meshed-discrete and continuous chains (same pairs and uniforms)");
    add_common(sub, true);
    sub->add_option("--n", couple.n, "mesh denominator")->capture_default_str();
    sub->add_option("--k", couple.k, "steps")->capture_default_str();
    sub->add_option("--N", couple.agents, "agents")->capture_default_str();
    sub->callback([&] {
      action = [&](RunContext& c) {
        record("n", couple.n);
        record("k", couple.k);
        record("N", couple.agents);
        RngStream rng(require_seed(c), 0);
        const auto start = initial_population("uniform_simplex", couple.agents, 1.0, rng);
        const auto paths = coupled_paths(start, MeshSpec(couple.n), couple.k, rng);
        const double bound = 2.0 * static_cast<double>(couple.k) / static_cast<double>(couple.n);
        const bool pass = paths.sup_distance <= bound;
        std::ostringstream csv;
        csv << "step,agent_index,discrete,continuous\n";
        for (std::size_t s = 0; s < paths.discrete.size(); ++s)
          for (std::size_t i = 0; i < couple.agents; ++i)
            csv << s << ',' << i << ',' << format_double(paths.discrete[s][i]) << ','
                << format_double(paths.continuous[s][i]) << '\n';
        write_text(c.out / "paths.csv", csv.str());
        json rep{{"n", couple.n}, {"k", couple.k}, {"N", couple.agents}, {"sup_distance", paths.sup_distance},
                 {"bound", bound}, {"pass", pass}};
        write_json(c.out / "report.json", rep);
        print_check("sup_distance", paths.sup_distance, bound, pass);
        return pass ? 0 : kExitFail;
      };
    });
  }

  // martingale-test -----------------------------------------------------------
  struct {
    std::size_t agents = 100, replicas = 200;
    Real horizon{"5"}, total{"0"};
    std::string g = "exp";
  } mart;
  {
    auto* sub = app.add_subcommand("martingale-test", "ensemble check of E[sup M^2] <= 64 ||g||^2 T / N");
    add_common(sub, true);
    sub->add_option("--N", mart.agents, "agents")->capture_default_str();
    sub->add_option("--T", mart.horizon, "horizon");
    sub->add_option("--replicas", mart.replicas, "replicas (>= 100)")->capture_default_str();
    sub->add_option("--total", mart.total, "total wealth W_N (0: N)");
    sub->add_option("--g", mart.g, "test function: exp, exp:<rate>")->capture_default_str();
    sub->callback([&] {
      action = [&](RunContext& c) {
        record("N", mart.agents);
        record("T", mart.horizon.text);
        record("replicas", mart.replicas);
        record("total", mart.total.text);
        record("g", mart.g);
        const auto g = parse_test_function(mart.g);
        EnsembleParams p{mart.agents, mart.horizon.value(), mart.total.value(), mart.replicas, require_seed(c),
                         common.jobs};
        const auto rep = martingale_bound_check(p, g);
        // Path of replica 0 for plotting.
        RngStream rng(p.seed, 0);
        const auto start = ensemble_initial_state(p, rng);
        const auto traj = poisson_simulate(start, {p.horizon, 0.0}, rng);
        write_martingale_csv(c.out / "martingale.csv", martingale_residual(traj, g, start.total() * (1 + 1e-9)));
        json j{{"g", rep.g},
               {"N", rep.agents},
               {"T", rep.horizon},
               {"replicas", rep.replicas},
               {"empirical", rep.empirical},
               {"standard_error", rep.standard_error},
               {"mean_terminal", rep.mean_terminal},
               {"terminal_standard_error", rep.terminal_standard_error},
               {"bound", rep.bound},
               {"pass", rep.pass}};
        write_json(c.out / "report.json", j);
        print_check("E[sup M^2]", rep.empirical, rep.bound, rep.pass);
        return rep.pass ? 0 : kExitFail;
      };
    });
  }

  // kinetic-solve -------------------------------------------------------------
  struct {
    Real w0{"inf"}, horizon{"10"}, dt{"0.05"}, x_max{"30"}, interval{"1"}, clip{"1e-4"};
    std::size_t cells = 3000;
    std::string initial = "exponential:1", integrator = "rk4";
  } kin;
  auto kinetic_config = [&]() {
    KineticRunConfig k;
    k.w0 = kin.w0.value();
    k.horizon = kin.horizon.value();
    k.dt = kin.dt.value();
    k.x_max = kin.x_max.value();
    k.cells = kin.cells;
    k.initial = kin.initial;
    k.snapshot_interval = kin.interval.value();
    k.max_clip_per_step = kin.clip.value();
    if (kin.integrator == "rk4") k.integrator = Integrator::rk4;
    else if (kin.integrator == "euler") k.integrator = Integrator::euler;
    else throw ConfigError("integrator must be rk4 or euler");
    return k;
  };
  {
    auto* sub = app.add_subcommand("kinetic-solve", "time-step the kinetic equation on a uniform grid");
    add_common(sub, false);
    sub->add_option("--w0", kin.w0, "pair-sum cap (inf for none)");
    sub->add_option("--T", kin.horizon, "horizon");
    sub->add_option("--dt", kin.dt, "time step (<= 0.25)");
    sub->add_option("--x-max", kin.x_max, "grid right end");
    sub->add_option("--cells", kin.cells, "grid cells")->capture_default_str();
    sub->add_option("--initial", kin.initial,
                    "exponential:m | uniform:a:b | truncated_exponential:m:w0 | geometric:p | spike")
        ->capture_default_str();
    sub->add_option("--snapshot-interval", kin.interval, "snapshot spacing");
    sub->add_option("--integrator", kin.integrator, "rk4 | euler")->capture_default_str();
    sub->add_option("--max-clip", kin.clip, "per-step clipped mass that aborts the run");
    sub->callback([&] {
      action = [&](RunContext& c) {
        record("w0", kin.w0.text);
        record("T", kin.horizon.text);
        record("dt", kin.dt.text);
        record("x_max", kin.x_max.text);
        record("cells", kin.cells);
        record("initial", kin.initial);
        record("snapshot_interval", kin.interval.text);
        record("integrator", kin.integrator);
        record("max_clip", kin.clip.text);
        const auto sol = kinetic_solve(kinetic_config());
        json manifest{{"snapshots", json::array()},
                      {"steps", sol.steps},
                      {"clipped_mass_total", sol.clipped_mass_total},
                      {"max_clipped_per_step", sol.max_clipped_per_step},
                      {"leaked_mass_total", sol.leaked_mass_total}};
        for (std::size_t i = 0; i < sol.snapshots.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof name, "density_%04zu.csv", i);
          write_density_csv(c.out / name, sol.snapshots[i].density);
          manifest["snapshots"].push_back({{"time", sol.snapshots[i].time},
                                           {"file", name},
                                           {"mass", sol.snapshots[i].density.mass()},
                                           {"mean", sol.snapshots[i].density.first_moment()}});
        }
        write_json(c.out / "manifest.json", manifest);
        std::cout << "kinetic-solve: " << sol.steps << " steps, " << sol.snapshots.size()
                  << " snapshots, clipped mass " << format_double(sol.clipped_mass_total) << "\n";
        return 0;
      };
    });
  }

  // equilibria-check ----------------------------------------------------------
  struct {
    Real w0{"inf"}, m{"1"}, x_max{"30"}, threshold{"5e-3"};
    std::size_t cells = 3000;
  } eq;
  {
    auto* sub = app.add_subcommand("equilibria-check", "sup |Q-bar(f)| for the (truncated) exponential family");
    add_common(sub, false);
    sub->add_option("--w0", eq.w0, "pair-sum cap (inf for none)");
    sub->add_option("--m", eq.m, "exponential scale");
    sub->add_option("--x-max", eq.x_max, "grid right end (replaced by w0 when finite)");
    sub->add_option("--cells", eq.cells, "grid cells")->capture_default_str();
    sub->add_option("--threshold", eq.threshold, "pass threshold");
    sub->callback([&] {
      action = [&](RunContext& c) {
        const double w0 = eq.w0.value();
        const double x_max = std::isinf(w0) ? eq.x_max.value() : w0;
        record("w0", eq.w0.text);
        record("m", eq.m.text);
        record("x_max", format_double(x_max));
        record("cells", eq.cells);
        record("threshold", eq.threshold.text);
        const auto f = equilibrium_density(eq.m.value(), w0, x_max, eq.cells);
        const auto q = qbar_apply(f, w0);
        double residual = 0.0;
        for (double v : q) residual = std::max(residual, std::abs(v));
        const bool pass = residual <= eq.threshold.value();
        write_values_csv(c.out / "residual.csv", q);
        json rep{{"w0", jnum(w0)}, {"m", eq.m.value()}, {"cells", eq.cells}, {"x_max", x_max},
                 {"residual", residual}, {"threshold", eq.threshold.value()}, {"pass", pass}};
        write_json(c.out / "report.json", rep);
        print_check("sup|Q(f)|", residual, eq.threshold.value(), pass);
        return pass ? 0 : kExitFail;
      };
    });
  }

  // laplace-check -------------------------------------------------------------
  struct {
    std::string density = "exponential:1";
    Real x_max{"30"}, t_max{"10"}, threshold{"1e-3"};
    std::size_t cells = 3000, points = 40;
  } lap;
  {
    auto* sub = app.add_subcommand("laplace-check", "Laplace transform against the exponential-family fit");
    add_common(sub, false);
    sub->add_option("--density", lap.density, "density spec (as kinetic-solve --initial)")->capture_default_str();
    sub->add_option("--x-max", lap.x_max, "grid right end");
    sub->add_option("--cells", lap.cells, "grid cells")->capture_default_str();
    sub->add_option("--t-max", lap.t_max, "largest transform argument");
    sub->add_option("--points", lap.points, "transform points on (0, t-max]")->capture_default_str();
    sub->add_option("--threshold", lap.threshold, "max deviation accepted as exponential");
    sub->callback([&] {
      action = [&](RunContext& c) {
        record("density", lap.density);
        record("x_max", lap.x_max.text);
        record("cells", lap.cells);
        record("t_max", lap.t_max.text);
        record("points", lap.points);
        record("threshold", lap.threshold.text);
        std::vector<double> ts;
        for (std::size_t k = 1; k <= lap.points; ++k)
          ts.push_back(lap.t_max.value() * static_cast<double>(k) / static_cast<double>(lap.points));
        const auto rep = laplace_check(make_density(lap.density, lap.x_max.value(), lap.cells), ts);
        const bool exponential = rep.max_deviation <= lap.threshold.value();
        std::ostringstream csv;
        csv << "t,transform,fit\n";
        for (std::size_t k = 0; k < ts.size(); ++k)
          csv << format_double(ts[k]) << ',' << format_double(rep.transform[k]) << ','
              << format_double(1.0 / (1.0 + rep.fitted_mean * ts[k])) << '\n';
        write_text(c.out / "laplace.csv", csv.str());
        json j{{"density", lap.density}, {"fitted_mean", rep.fitted_mean}, {"max_deviation", rep.max_deviation},
               {"threshold", lap.threshold.value()}, {"exponential", exponential}};
        write_json(c.out / "report.json", j);
        print_check("max deviation from 1/(1+m t)", rep.max_deviation, lap.threshold.value(), exponential);
        std::cout << "verdict: " << (exponential ? "exponential" : "not exponential") << "\n";
        return 0;
      };
    });
  }

  // partition-sample / limit-check ---------------------------------------------
  struct {
    std::string sampler = "uniform_simplex", target = "exponential";
    std::int64_t n = 0;
    std::size_t agents = 10000, samples = 1;
    Real total{"0"}, p{"0.5"}, eps{"0.01"};
  } part;
  auto sampler_spec = [&]() {
    SamplerSpec s;
    s.kind = parse_sampler_kind(part.sampler);
    s.n = part.n;
    s.agents = part.agents;
    s.total_wealth = part.total.value();
    s.p = part.p.value();
    s.validate();
    return s;
  };
  auto add_sampler_options = [&](CLI::App* sub) {
    sub->add_option("--sampler", part.sampler,
                    "uniform_composition | scaled_geometric | fixed_p_geometric | uniform_simplex")
        ->capture_default_str();
    sub->add_option("--N", part.agents, "parts")->capture_default_str();
    sub->add_option("--n", part.n, "units (uniform_composition)");
    sub->add_option("--W", part.total, "total wealth W_N (scaled_geometric)");
    sub->add_option("--p", part.p, "success probability (fixed_p_geometric)");
  };
  auto record_sampler = [&] {
    record("sampler", part.sampler);
    record("N", part.agents);
    record("n", part.n);
    record("W", part.total.text);
    record("p", part.p.text);
  };
  {
    auto* sub = app.add_subcommand("partition-sample", "one draw from a partition sampler");
    add_common(sub, true);
    add_sampler_options(sub);
    sub->callback([&] {
      action = [&](RunContext& c) {
        record_sampler();
        RngStream rng(require_seed(c), 0);
        const auto spec = sampler_spec();
        std::vector<double> values;
        if (spec.kind == SamplerSpec::Kind::uniform_composition) {
          const auto s = sample_uniform_composition(spec.n, spec.agents, rng);
          for (auto v : s.counts()) values.push_back(static_cast<double>(v));
        } else {
          const auto s = sample(spec, rng);
          values.assign(s.wealth().begin(), s.wealth().end());
        }
        write_values_csv(c.out / "partition.csv", values);
        std::cout << "partition-sample: " << values.size() << " parts\n";
        return 0;
      };
    });
  }
  {
    auto* sub = app.add_subcommand("limit-check", "compare a partition sampler with its limit law");
    add_common(sub, true);
    add_sampler_options(sub);
    sub->add_option("--target", part.target, "exponential | geometric | point_mass_zero")->capture_default_str();
    sub->add_option("--samples", part.samples, "independent draws (all must pass)")->capture_default_str();
    sub->add_option("--eps", part.eps, "threshold for the point-mass check");
    sub->callback([&] {
      action = [&](RunContext& c) {
        record_sampler();
        record("target", part.target);
        record("samples", part.samples);
        record("eps", part.eps.text);
        RngStream rng(require_seed(c), 0);
        const auto rep = limit_check(sampler_spec(), parse_limit_target(part.target), part.samples, rng,
                                     part.eps.value());
        json j{{"sampler", rep.sampler},     {"target", rep.target},       {"N", rep.agents},
               {"samples", rep.samples},     {"statistic", rep.statistic}, {"wasserstein", rep.wasserstein},
               {"threshold", rep.threshold}, {"pass", rep.pass}};
        write_json(c.out / "report.json", j);
        print_check(rep.target == "point_mass_zero" ? "fraction above eps" : "KS", rep.statistic, rep.threshold,
                    rep.pass);
        return rep.pass ? 0 : kExitFail;
      };
    });
  }

  // oracle --------------------------------------------------------------------
  struct {
    std::int64_t n = 3, agents = 3;
    Real tol{"1e-10"};
  } orc;
  {
    auto* sub = app.add_subcommand("oracle", "exact transition matrix and stationary law of the integer chain");
    add_common(sub, false);
    sub->add_option("--n", orc.n, "total units")->capture_default_str();
    sub->add_option("--N", orc.agents, "agents")->capture_default_str();
    sub->add_option("--tol", orc.tol, "uniformity tolerance");
    sub->callback([&] {
      action = [&](RunContext& c) {
        record("n", orc.n);
        record("N", orc.agents);
        record("tol", orc.tol.text);
        const auto m = build_transition_matrix(orc.n, orc.agents);
        const auto st = stationary_distribution(m);
        const double uniform = 1.0 / static_cast<double>(m.size());
        double max_dev = 0.0, max_dev_weighted = 0.0, z = 0.0;
        std::vector<double> weighted(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
          int positive = 0;
          for (auto v : m.states()[i].counts()) positive += v > 0 ? 1 : 0;
          z += (weighted[i] = std::ldexp(1.0, positive));
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
          max_dev = std::max(max_dev, std::abs(st.distribution[i] - uniform));
          max_dev_weighted = std::max(max_dev_weighted, std::abs(st.distribution[i] - weighted[i] / z));
        }
        const bool is_uniform = max_dev <= orc.tol.value();
        write_matrix_csv(c.out / "transition.csv", m);
        write_state_legend_csv(c.out / "states.csv", m);
        write_values_csv(c.out / "stationary.csv", st.distribution);
        json j{{"n", orc.n},
               {"N", orc.agents},
               {"states", m.size()},
               {"row_sum_error", m.max_row_sum_error()},
               {"column_sum_error", m.max_column_sum_error()},
               {"stationary", is_uniform ? "uniform" : "non-uniform"},
               {"max_dev", max_dev},
               {"max_dev_from_2pow_positive_law", max_dev_weighted},
               {"iterations", st.iterations},
               {"tol", orc.tol.value()},
               {"pass", is_uniform}};
        write_json(c.out / "report.json", j);
        print_check("stationary max deviation from uniform", max_dev, orc.tol.value(), is_uniform);
        std::cout << "row sum error " << format_double(m.max_row_sum_error()) << ", column sum error "
                  << format_double(m.max_column_sum_error()) << "\n";
        return is_uniform ? 0 : kExitFail;
      };
    });
  }

  try {
    const auto args = expand_config(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    ctx.subcommand = app.get_subcommands().front()->get_name();
    ctx.seed = common.seed;
    if (const char* env = std::getenv("EXKIN_SEED"); env && *env) {
      try {
        ctx.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("EXKIN_SEED is not an unsigned integer: ") + env);
      }
    }
    ctx.out = common.out;
    fs::create_directories(ctx.out);
    const int code = action(ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{{"subcommand", ctx.subcommand},
                  {"config", ctx.config},
                  {"seed", ctx.seed ? json(*ctx.seed) : json(nullptr)},
                  {"jobs", common.jobs},
                  {"versions", {{"exkin", EXKIN_VERSION}, {"boost", BOOST_LIB_VERSION}, {"compiler", __VERSION__}}},
                  {"exit_code", code},
                  {"wall_time_seconds", wall}};
    write_json(ctx.out / "run.json", manifest);
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
