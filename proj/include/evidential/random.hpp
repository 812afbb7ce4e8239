#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evidential {

/// Seedable generator with bit-exact output on every platform: the engine and
/// std::seed_seq are fully specified by the standard, and the floating-point
/// conversions below are done by hand rather than through std distributions.
class Rng {
public:
  static constexpr const char* kName = "mt19937_64/seed_seq(seed,stream)";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

private:
  std::mt19937_64 engine_;
};

}  // namespace evidential
