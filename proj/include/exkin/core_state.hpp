#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace exkin {

// A composition of `total` wealth units among N >= 2 agents.
class DiscreteWealthState {
 public:
  explicit DiscreteWealthState(std::vector<std::int64_t> counts);

  std::size_t agents() const { return counts_.size(); }
  std::int64_t total() const { return total_; }
  std::int64_t operator[](std::size_t i) const { return counts_[i]; }
  std::span<const std::int64_t> counts() const { return counts_; }

  friend bool operator==(const DiscreteWealthState&, const DiscreteWealthState&) = default;
  friend auto operator<=>(const DiscreteWealthState&, const DiscreteWealthState&) = default;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

// Nonnegative real wealth of N >= 2 agents. The stored total is the
// conserved quantity; the entries may drift from it by at most
// kConservationTolerance * max(1, total).
class ContinuousWealthState {
 public:
  static constexpr double kConservationTolerance = 1e-9;

  // Total taken as the sum of the entries.
  explicit ContinuousWealthState(std::vector<double> wealth);
  ContinuousWealthState(std::vector<double> wealth, double total);

  std::size_t agents() const { return wealth_.size(); }
  double total() const { return total_; }
  double operator[](std::size_t i) const { return wealth_[i]; }
  std::span<const double> wealth() const { return wealth_; }

  // Scales a composition by 1/n onto the meshed simplex.
  static ContinuousWealthState from_discrete(const DiscreteWealthState& state, double scale);

  friend bool operator==(const ContinuousWealthState&, const ContinuousWealthState&) = default;

 private:
  std::vector<double> wealth_;
  double total_ = 0.0;
};

struct MeshSpec {
  std::int64_t denominator = 1;

  explicit MeshSpec(std::int64_t n);
  double width() const { return 1.0 / static_cast<double>(denominator); }
};

// [x]_n: the largest multiple of 1/n not exceeding x.
double mesh_floor(double x, MeshSpec mesh);

// True when every entry is a multiple of 1/n (to 1e-9 in units of the mesh).
bool on_mesh(std::span<const double> values, MeshSpec mesh);

// Binomial coefficient with overflow detection (std::overflow_error).
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Number of compositions of n into N nonnegative parts, C(n+N-1, N-1).
std::uint64_t composition_count(std::int64_t n, std::int64_t agents);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// All compositions of n into N parts in lexicographic order.
std::vector<DiscreteWealthState> enumerate_states(std::int64_t n, std::int64_t agents,
                                                  std::uint64_t cap = kDefaultEnumerationCap);

// State CSV: a `# N=<N> total=<W>` header followed by `agent_index,wealth` rows.
void write_state_csv(std::ostream& out, const ContinuousWealthState& state);
ContinuousWealthState read_state_csv(std::istream& in);

}  // namespace exkin
