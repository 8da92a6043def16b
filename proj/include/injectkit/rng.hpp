#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace injectkit {

/// Seeded generator with platform-independent draws. std::mt19937_64 output
/// is fixed by the standard; the standard distributions are not, so bounded
/// and real draws are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound). bound must be > 0.
    std::uint64_t uniform(std::uint64_t bound);

    /// Uniform in [lo, hi] inclusive.
    std::uint64_t uniform_between(std::uint64_t lo, std::uint64_t hi) { return lo + uniform(hi - lo + 1); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    void fill(std::span<std::uint8_t> out);

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; good avalanche for deriving independent seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives the seed for sub-stream `index` of `seed`. Adding a stream never
/// perturbs the seeds of existing ones.
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

} // namespace injectkit
