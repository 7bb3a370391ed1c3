#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "exkin/errors.hpp"
#include "exkin/format.hpp"
#include "exkin/io.hpp"

using namespace exkin;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "exkin_test_io" / name;
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("flat config: comments, trimming, last key wins") {
  std::istringstream in("# header\n\n  seed = 42  \nN=10 # trailing\nN = 20\nw0=inf\n");
  const auto cfg = parse_flat_config(in);
  CHECK(cfg.size() == 3);
  CHECK(cfg.at("seed") == "42");
  CHECK(cfg.at("N") == "20");
  CHECK(cfg.at("w0") == "inf");
}

TEST_CASE("flat config: malformed lines are config errors") {
  std::istringstream no_eq("seed 42\n");
  CHECK_THROWS_AS(parse_flat_config(no_eq), ConfigError);
  std::istringstream no_key(" = 3\n");
  CHECK_THROWS_AS(parse_flat_config(no_key), ConfigError);
  CHECK_THROWS_AS(read_flat_config("/nonexistent/exkin.cfg"), ConfigError);
}

TEST_CASE("events and snapshots csv layout") {
  const auto dir = scratch("events");
  TrajectoryRecord traj{ContinuousWealthState({1.0, 1.0}), 1.0, {{0.25, 0, 1, 0.5}, {0.75, 1, 0, 0.125}}, {}};
  traj.snapshots = {{0.0, {1.0, 1.0}}, {1.0, {0.5, 1.5}}};
  write_events_csv(dir / "nested" / "events.csv", traj);
  write_snapshots_csv(dir / "snapshots.csv", traj.snapshots);
  const auto ev = lines_of(dir / "nested" / "events.csv");
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == "time,event_index,i,j,r");
  CHECK(ev[1] == "0.25,0,0,1,0.5");
  CHECK(ev[2] == "0.75,1,1,0,0.125");
  const auto sn = lines_of(dir / "snapshots.csv");
  REQUIRE(sn.size() == 5);
  CHECK(sn[0] == "time,agent_index,wealth");
  CHECK(sn[4] == "1,1,1.5");
}

TEST_CASE("martingale, values and density csv layout") {
  const auto dir = scratch("series");
  MartingalePath m{{0.0, 0.5}, {0.0, -0.25}};
  write_martingale_csv(dir / "m.csv", m);
  CHECK(lines_of(dir / "m.csv") == std::vector<std::string>{"time,M_value", "0,0", "0.5,-0.25"});
  const std::vector<double> v{3.0, 0.1};
  write_values_csv(dir / "v.csv", v);
  CHECK(lines_of(dir / "v.csv") == std::vector<std::string>{"index,value", "0,3", "1,0.10000000000000001"});
  write_density_csv(dir / "f.csv", GriddedDensity(2.0, {0.25, 0.25}));
  CHECK(lines_of(dir / "f.csv") == std::vector<std::string>{"x,f(x)", "0.5,0.25", "1.5,0.25"});
}

TEST_CASE("transition matrix csv: nonzero entries, rows sum to one, legend matches") {
  const auto dir = scratch("matrix");
  const auto m = build_transition_matrix(2, 2);
  write_matrix_csv(dir / "transition.csv", m);
  write_state_legend_csv(dir / "states.csv", m);
  const auto rows = lines_of(dir / "transition.csv");
  REQUIRE(!rows.empty());
  CHECK(rows[0] == "from,to,probability");
  std::map<int, double> row_sum;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::istringstream line(rows[k]);
    std::string from, to, p;
    std::getline(line, from, ',');
    std::getline(line, to, ',');
    std::getline(line, p);
    CHECK(parse_double(p) > 0.0);
    row_sum[std::stoi(from)] += parse_double(p);
  }
  CHECK(row_sum.size() == 3);
  for (const auto& [from, s] : row_sum) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  const auto legend = lines_of(dir / "states.csv");
  REQUIRE(legend.size() == 4);
  CHECK(legend[0] == "state_index,state");
  CHECK(legend[1].rfind("0,", 0) == 0);
}

TEST_CASE("writers are byte-stable") {
  const auto dir = scratch("stable");
  const std::vector<double> v{1.0 / 3.0, 2.5e-17, 1e300};
  write_values_csv(dir / "a.csv", v);
  write_values_csv(dir / "b.csv", v);
  std::ifstream a(dir / "a.csv"), b(dir / "b.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(parse_double(lines_of(dir / "a.csv")[1].substr(2)) == 1.0 / 3.0);
}
