#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fluidlob {

/// SplitMix64 finalizer; used for all seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// Stable 64-bit hash of a stream name (FNV-1a).
std::uint64_t hash_name(std::string_view name);

/// Seed of the substream `name`[`index`] under `master_seed`.
///
/// Substreams are keyed by name and index only, so adding exchanges (new
/// indices) never perturbs the draws of existing streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name,
                          std::uint64_t index = 0);

/// A named random stream. Draws are produced from raw 64-bit engine outputs
/// with hand-written transforms so results do not depend on the standard
/// library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0)
      : engine_(derive_seed(master_seed, name, index)) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);
  double standard_normal();

  /// Running hash of every raw output consumed so far.
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t fingerprint_ = 0x9e3779b97f4a7c15ULL;
  std::uint64_t draws_ = 0;
};

}  // namespace fluidlob
