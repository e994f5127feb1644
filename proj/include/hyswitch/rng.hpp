#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hyswitch {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Depends only on the pair, so
/// results do not depend on which thread runs which index.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ull));
}

/// Random stream with platform-independent transforms on top of
/// std::mt19937_64 (whose raw output is fixed by the standard).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Exponential with the given rate (mean 1/rate); always > 0.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

  private:
    std::mt19937_64 engine_;
};

} // namespace hyswitch
