#pragma once

#include <cstdint>

namespace alflab {

/// PCG32: tiny deterministic generator. Output is identical across platforms and
/// standard-library versions, which the byte-identical-CSV reproducibility contract
/// needs (std::uniform_real_distribution is implementation-defined).
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t seq = 0xda3e39cb94b95bdbULL) {
    state_ = 0;
    inc_ = (seq << 1u) | 1u;
    next();
    state_ += seed;
    next();
  }

  std::uint32_t next() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted = std::uint32_t(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = std::uint32_t(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31));
  }

  /// Uniform in [0, 1).
  double uniform() { return next() * (1.0 / 4294967296.0); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_, inc_;
};

}  // namespace alflab
