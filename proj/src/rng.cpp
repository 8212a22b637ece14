#include "fluidlob/rng.hpp"

#include <cmath>
#include <numbers>

namespace fluidlob {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name,
                          std::uint64_t index) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ hash_name(name));
  s = splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return s;
}

std::uint64_t RandomStream::next_u64() {
  std::uint64_t x = engine_();
  fingerprint_ = splitmix64(fingerprint_ ^ x);
  ++draws_;
  return x;
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
  return -std::log(uniform_pos()) / rate;
}

double RandomStream::standard_normal() {
  // Box-Muller, cosine branch only.
  const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  return r * std::cos(theta);
}

}  // namespace fluidlob
