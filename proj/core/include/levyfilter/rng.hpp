#pragma once

#include <cstdint>
#include <limits>

namespace levyfilter {

/// SplitMix64 generator. Eight bytes of state, so one independent stream per
/// particle is affordable; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform double strictly inside (0, 1), 53-bit resolution.
    double uniform_open() noexcept;

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Finalizer of SplitMix64 (Stafford variant 13).
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Named substreams of one scenario seed.
enum class Stream : std::uint64_t {
    State = 1,
    Observation = 2,
    Particles = 3,
    Resampling = 4,
    InitialCondition = 5,
    MonteCarlo = 6,
};

/// Seed of substream `stream`, member `index`:
///   mix64(mix64(seed ^ (stream * 0xD1B54A32D192ED03)) + index * 0x9E3779B97F4A7C15)
/// Distinct (stream, index) pairs give unrelated SplitMix64 start states.
std::uint64_t substream_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept;

inline SplitMix64 make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept {
    return SplitMix64(substream_seed(seed, stream, index));
}

}  // namespace levyfilter
