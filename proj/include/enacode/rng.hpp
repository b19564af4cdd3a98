#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace enacode {

/// Sampler random stream, fully specified so runs reproduce on any platform:
///   engine   std::mt19937_64 (fixed by the C++ standard)
///   seeding  engine seed = splitmix64(seed)
///   doubles  (engine() >> 11) * 2^-53, uniform on [0, 1)
///   ints     below(n) = ((engine() >> 32) * n) >> 32
///   streams  derive_seed(base, id) = splitmix64(base ^ splitmix64(id))
/// Standard-library distributions are avoided because their output is
/// implementation-defined. See docs/rng.md.
inline constexpr std::string_view kRngName = "mt19937_64+splitmix64/v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  return splitmix64(base ^ splitmix64(stream));
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(((engine_() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
  }

  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace enacode
