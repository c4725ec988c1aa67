#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace riskaudit {

/// 64-bit finalizer (splitmix64). Used to derive well-separated seeds from
/// structured inputs such as (base_seed, stream_id, replicate).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ b);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b) ^ c);
}

/// FNV-1a over a byte string. Stream ids and config digests are derived
/// from names with this so they are stable across runs and platforms.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
/// the standard); doubles and bounded ints are derived from raw 64-bit
/// output by hand so results do not depend on libstdc++'s distribution
/// implementations.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : engine_(mix64(seed)) {}
  StreamRng(std::uint64_t base_seed, std::uint64_t stream_id, std::uint64_t replicate)
      : engine_(mix64(base_seed, stream_id, replicate)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, n). Lemire's multiply-shift; the modulo bias is
  /// below 2^-64 and acceptable for resampling.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace riskaudit
