#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace htpa {

/// Seed used whenever the caller does not supply one. Never derived from the clock.
inline constexpr std::uint64_t kDefaultSeed = 20140527ULL;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seedable, splittable 64-bit generator.
///
/// The engine is MT19937-64; a (seed, stream) pair is hashed through
/// SplitMix64 into the engine seed, so independent replicas and worker
/// chunks each get their own reproducible stream. Satisfies
/// UniformRandomBitGenerator, so <random> distributions accept it.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = kDefaultSeed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream),
          engine_(detail::splitmix64(seed ^ detail::splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    result_type operator()() { return engine_(); }

    /// Child generator for stream `stream` of the same seed.
    [[nodiscard]] Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_low() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
        return dist(*this);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace htpa
