#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace alap {

/// Counter-based generator (Philox-4x32-10). Period 2^128 per seed across the
/// stream/counter space; substreams are independent by construction, so one
/// handle per thread or per grid cell gives results that do not depend on
/// scheduling. The generator choice is pinned: golden-value tests rely on the
/// exact output sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<std::uint32_t>(stream);
    ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
    idx_ = 4;
  }

  std::uint32_t next_u32() {
    if (idx_ == 4) refill();
    return out_[idx_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1); safe as a log/quantile argument.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (the sine partner is cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Unit-rate exponential.
  double exponential() { return -std::log(uniform_open()); }

  /// Geometric on {1,2,...} with success probability p.
  std::uint64_t geometric(double p) {
    if (p >= 1.0) return 1;
    const double g = std::floor(std::log(uniform_open()) / std::log1p(-p));
    return 1 + static_cast<std::uint64_t>(g);
  }

  /// SplitMix64 finaliser; used to derive per-cell seeds from a cell index.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b, std::uint32_t* lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    *lo = static_cast<std::uint32_t>(p);
    return static_cast<std::uint32_t>(p >> 32);
  }

  void refill() {
    std::array<std::uint32_t, 4> c = ctr_;
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint32_t lo0, lo1;
      const std::uint32_t hi0 = mulhi(0xD2511F53u, c[0], &lo0);
      const std::uint32_t hi1 = mulhi(0xCD9E8D57u, c[2], &lo1);
      const std::array<std::uint32_t, 4> next = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
      c = next;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_ = c;
    idx_ = 0;
    if (++ctr_[0] == 0) ++ctr_[1];  // 2^64 blocks per stream
  }

  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> out_{};
  int idx_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace alap
