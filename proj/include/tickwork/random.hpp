#pragma once

#include <cstdint>
#include <random>

namespace tickwork {

/// Identity of a random stream. Equal identities give bit-identical draws.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// SplitMix64 finalizer; used to derive per-stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Generator bound to one RngStream.
///
/// The engine is seeded from a hash of (master_seed, stream_index), so every
/// trial of an ensemble owns an independent generator and no state is shared
/// between threads. Uniform and Gaussian transforms are implemented here
/// rather than through <random> distributions, whose output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(RngStream id);

  /// Uniform draw on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal draw (Marsaglia polar method).
  double normal() noexcept;
  /// Exponential draw with the given rate (> 0).
  double exponential(double rate) noexcept;

  const RngStream& id() const noexcept { return id_; }

 private:
  RngStream id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tickwork
