#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace aoicache::desim {

/// Independent random streams used by one replication.
enum class Stream : std::uint64_t {
    arrivals = 1,
    items = 2,
    uplink = 3,    // conventional uplink, RSUC updater, ReA fetch phase
    downlink = 4,  // every delivery transmission
    updates = 5,   // ReA update decisions
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream derivation rule: seed -> (replication, purpose)
///   mix64(mix64(mix64(seed) ^ replication) ^ purpose)
/// Each derived value seeds its own mt19937_64.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t replication, Stream purpose) noexcept {
    return mix64(mix64(mix64(seed) ^ replication) ^ static_cast<std::uint64_t>(purpose));
}

/// Thin wrapper over mt19937_64 with platform-independent conversions to
/// floating point (std distributions are implementation-defined).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1] with 53-bit resolution.
    double uniform_open_closed() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// Inverse transform: -mean * ln(u) for u in (0, 1].
double exponential_from_uniform(double u, double mean);

double draw_exponential(RandomStream& rng, double mean);

/// Cumulative table for categorical draws over item indices.
class ItemSampler {
public:
    explicit ItemSampler(std::span<const double> weights);

    std::size_t size() const noexcept { return cumulative_.size(); }
    std::size_t draw(RandomStream& rng) const;
    /// Index selected by a uniform value u in [0, 1).
    std::size_t select(double u) const;

private:
    std::vector<double> cumulative_;
};

/// One categorical draw; builds the cumulative table each call, so prefer
/// ItemSampler in loops.
std::size_t assign_item(RandomStream& rng, std::span<const double> weights);

}  // namespace aoicache::desim
