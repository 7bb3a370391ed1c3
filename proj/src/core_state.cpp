#include "exkin/core_state.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "exkin/errors.hpp"
#include "exkin/format.hpp"

namespace exkin {

DiscreteWealthState::DiscreteWealthState(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  if (counts_.size() < 2) throw std::invalid_argument("a wealth state needs at least 2 agents");
  for (auto c : counts_) {
    if (c < 0) throw std::domain_error("wealth counts must be nonnegative");
    if (total_ > std::numeric_limits<std::int64_t>::max() - c)
      throw std::overflow_error("total wealth overflows 64 bits");
    total_ += c;
  }
}

ContinuousWealthState::ContinuousWealthState(std::vector<double> wealth)
    : ContinuousWealthState(wealth, std::accumulate(wealth.begin(), wealth.end(), 0.0)) {}

ContinuousWealthState::ContinuousWealthState(std::vector<double> wealth, double total)
    : wealth_(std::move(wealth)), total_(total) {
  if (wealth_.size() < 2) throw std::invalid_argument("a wealth state needs at least 2 agents");
  if (!std::isfinite(total_) || total_ < 0.0) throw std::domain_error("total wealth must be finite and nonnegative");
  double sum = 0.0;
  for (double w : wealth_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::domain_error("wealth entries must be finite and nonnegative");
    sum += w;
  }
  if (std::abs(sum - total_) > kConservationTolerance * std::max(1.0, total_)) {
    std::ostringstream msg;
    msg << "wealth entries sum to " << sum << " but total is " << total_;
    throw std::domain_error(msg.str());
  }
}

ContinuousWealthState ContinuousWealthState::from_discrete(const DiscreteWealthState& state, double scale) {
  std::vector<double> w(state.agents());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(state[i]) * scale;
  return ContinuousWealthState(std::move(w), static_cast<double>(state.total()) * scale);
}

MeshSpec::MeshSpec(std::int64_t n) : denominator(n) {
  if (n < 1) throw std::domain_error("mesh denominator must be >= 1");
}

double mesh_floor(double x, MeshSpec mesh) {
  if (!(x >= 0.0)) throw std::domain_error("mesh_floor requires x >= 0");
  const double n = static_cast<double>(mesh.denominator);
  return std::floor(n * x) / n;
}

bool on_mesh(std::span<const double> values, MeshSpec mesh) {
  const double n = static_cast<double>(mesh.denominator);
  for (double v : values) {
    const double units = v * n;
    if (std::abs(units - std::round(units)) > 1e-9 * std::max(1.0, std::abs(units))) return false;
  }
  return true;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // result * (n - k + i) / i stays integral at every step; 128-bit
  // intermediates catch the overflow before division.
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max())
      throw std::overflow_error("binomial coefficient exceeds 64-bit range");
  }
  return static_cast<std::uint64_t>(result);
}

std::uint64_t composition_count(std::int64_t n, std::int64_t agents) {
  if (n < 0 || agents < 1) throw std::domain_error("composition_count requires n >= 0 and N >= 1");
  const auto top = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(agents) - 1;
  return binomial(top, static_cast<std::uint64_t>(agents) - 1);
}

namespace {

void enumerate_into(std::int64_t remaining, std::size_t pos, std::vector<std::int64_t>& current,
                    std::vector<DiscreteWealthState>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (std::int64_t k = 0; k <= remaining; ++k) {
    current[pos] = k;
    enumerate_into(remaining - k, pos + 1, current, out);
  }
}

}  // namespace

std::vector<DiscreteWealthState> enumerate_states(std::int64_t n, std::int64_t agents, std::uint64_t cap) {
  if (agents < 2) throw std::invalid_argument("enumerate_states requires N >= 2");
  const std::uint64_t count = composition_count(n, agents);
  if (count > cap)
    throw ResourceLimitError("state space of " + std::to_string(count) + " compositions exceeds cap " +
                             std::to_string(cap));
  std::vector<DiscreteWealthState> out;
  out.reserve(count);
  std::vector<std::int64_t> current(static_cast<std::size_t>(agents), 0);
  enumerate_into(n, 0, current, out);
  return out;
}

void write_state_csv(std::ostream& out, const ContinuousWealthState& state) {
  out << "# N=" << state.agents() << " total=" << format_double(state.total()) << "\n";
  out << "agent_index,wealth\n";
  for (std::size_t i = 0; i < state.agents(); ++i) out << i << ',' << format_double(state[i]) << '\n';
}

ContinuousWealthState read_state_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# N=", 0) != 0)
    throw std::runtime_error("state CSV must start with '# N=<N> total=<W>'");
  std::size_t agents = 0;
  double total = 0.0;
  {
    std::istringstream header(line.substr(4));
    std::string rest;
    header >> agents >> rest;
    if (rest.rfind("total=", 0) != 0) throw std::runtime_error("state CSV header lacks total=");
    total = std::stod(rest.substr(6));
  }
  std::vector<double> wealth(agents, 0.0);
  std::vector<bool> seen(agents, false);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("agent_index", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed state row: " + line);
    const std::size_t idx = std::stoul(line.substr(0, comma));
    if (idx >= agents) throw std::runtime_error("agent index out of range: " + line);
    wealth[idx] = std::stod(line.substr(comma + 1));
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < agents; ++i)
    if (!seen[i]) throw std::runtime_error("state CSV misses agent " + std::to_string(i));
  return ContinuousWealthState(std::move(wealth), total);
}

}  // namespace exkin
