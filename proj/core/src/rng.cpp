#include "levyfilter/rng.hpp"

namespace levyfilter {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamKey = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SplitMix64::result_type SplitMix64::operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

double SplitMix64::uniform_open() noexcept {
    // (k + 0.5) / 2^53 for k in [0, 2^53)
    const std::uint64_t k = (*this)() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

std::uint64_t substream_seed(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
    const auto s = static_cast<std::uint64_t>(stream);
    return mix64(mix64(seed ^ (s * kStreamKey)) + index * kGolden);
}

}  // namespace levyfilter
