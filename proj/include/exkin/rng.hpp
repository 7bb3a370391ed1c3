#pragma once

#include <cstdint>
#include <random>

namespace exkin {

// Reproducible random stream keyed by (seed, stream_id). The engine is
// std::mt19937_64 seeded through std::seed_seq, both fully specified by the
// standard; all variates are derived from raw 64-bit outputs by hand so the
// draws are bit-identical across standard library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }
  // Uniform integer in [0, bound), exact (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound);
  double exponential(double rate = 1.0);
  // Failures before the first success: P(k) = p (1-p)^k, k = 0, 1, ...
  std::uint64_t geometric(double p);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace exkin
