#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gronwall {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-free reproducible stream: a fixed (seed, stream_id) pair always
/// produces the identical sequence, and distinct stream_ids under one seed
/// give statistically independent sequences.  Core generator is
/// xoshiro256**, state seeded via splitmix64 from both identifiers.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream_id *
                                                          0x9e3779b97f4a7c15ULL);
    for (auto& word : state_) word = detail::splitmix64(s);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derived stream for a sub-task (worker, path batch); deterministic.
  RngStream substream(std::uint64_t child_id) const {
    std::uint64_t mix = stream_id_;
    mix = mix * 0x100000001b3ULL ^ child_id;
    return RngStream(seed_, mix + 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on (0, 1): 53-bit mantissa, zero mapped away so logs are safe.
  double uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per call
  /// (no cached spare, so the draw count stays position-independent).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
};

}  // namespace gronwall
