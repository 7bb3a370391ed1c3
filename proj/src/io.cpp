#include "exkin/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "exkin/errors.hpp"
#include "exkin/format.hpp"

namespace exkin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

FlatConfig parse_flat_config(std::istream& in) {
  FlatConfig config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    config[key] = trim(line.substr(eq + 1));
  }
  return config;
}

FlatConfig read_flat_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_flat_config(in);
}

void write_events_csv(const std::filesystem::path& path, const TrajectoryRecord& traj) {
  auto out = open_output(path);
  out << "time,event_index,i,j,r\n";
  for (std::size_t k = 0; k < traj.events.size(); ++k) {
    const auto& ev = traj.events[k];
    out << format_double(ev.time) << ',' << k << ',' << ev.first_agent << ',' << ev.second_agent << ','
        << format_double(ev.fraction) << '\n';
  }
  finish(out, path);
}

void write_snapshots_csv(const std::filesystem::path& path, std::span<const Snapshot> snapshots) {
  auto out = open_output(path);
  out << "time,agent_index,wealth\n";
  for (const auto& snap : snapshots)
    for (std::size_t i = 0; i < snap.wealth.size(); ++i)
      out << format_double(snap.time) << ',' << i << ',' << format_double(snap.wealth[i]) << '\n';
  finish(out, path);
}

void write_martingale_csv(const std::filesystem::path& path, const MartingalePath& path_values) {
  auto out = open_output(path);
  out << "time,M_value\n";
  for (std::size_t k = 0; k < path_values.times.size(); ++k)
    out << format_double(path_values.times[k]) << ',' << format_double(path_values.values[k]) << '\n';
  finish(out, path);
}

void write_density_csv(const std::filesystem::path& path, const GriddedDensity& f) {
  auto out = open_output(path);
  out << "x,f(x)\n";
  for (std::size_t k = 0; k < f.cells(); ++k)
    out << format_double(f.center(k)) << ',' << format_double(f.values()[k]) << '\n';
  finish(out, path);
}

void write_values_csv(const std::filesystem::path& path, std::span<const double> values) {
  auto out = open_output(path);
  out << "index,value\n";
  for (std::size_t k = 0; k < values.size(); ++k) out << k << ',' << format_double(values[k]) << '\n';
  finish(out, path);
}

void write_matrix_csv(const std::filesystem::path& path, const TransitionMatrix& matrix) {
  auto out = open_output(path);
  out << "from,to,probability\n";
  for (std::size_t a = 0; a < matrix.size(); ++a)
    for (std::size_t b = 0; b < matrix.size(); ++b)
      if (matrix(a, b) != 0.0) out << a << ',' << b << ',' << format_double(matrix(a, b)) << '\n';
  finish(out, path);
}

void write_state_legend_csv(const std::filesystem::path& path, const TransitionMatrix& matrix) {
  auto out = open_output(path);
  out << "state_index,state\n";
  for (std::size_t a = 0; a < matrix.size(); ++a) {
    out << a << ',';
    const auto counts = matrix.states()[a].counts();
    for (std::size_t i = 0; i < counts.size(); ++i) out << (i ? " " : "") << counts[i];
    out << '\n';
  }
  finish(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  finish(out, path);
}

}  // namespace exkin
