#include "levyfilter/levy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "levyfilter/errors.hpp"

namespace levyfilter {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw DomainError("stability index alpha must lie in (0, 2), got " + std::to_string(alpha));
    }
}

}  // namespace

void StableParams::validate() const {
    check_alpha(alpha);
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("noise scale epsilon must be finite and >= 0, got " + std::to_string(epsilon));
    }
}

double StableParams::intensity() const { return std::pow(epsilon, alpha); }

double levy_constant(double alpha) {
    check_alpha(alpha);
    // lgamma keeps the ratio accurate; both gamma arguments are positive here.
    const double log_ratio = std::lgamma(0.5 * (1.0 + alpha)) - std::lgamma(1.0 - 0.5 * alpha);
    return alpha * std::exp(log_ratio) / (std::pow(2.0, 1.0 - alpha) * std::sqrt(std::numbers::pi));
}

JumpMeasure::JumpMeasure(double alpha) : alpha_(alpha), c_alpha_(levy_constant(alpha)) {}

double JumpMeasure::density(double y) const {
    if (y == 0.0) {
        throw DomainError("jump density is singular at y = 0");
    }
    return c_alpha_ * std::pow(std::abs(y), -(1.0 + alpha_));
}

double jump_density(const JumpMeasure& measure, double y) { return measure.density(y); }

double cms_variate(double alpha, double angle, double exponential) {
    if (alpha == 1.0) {
        return std::tan(angle);
    }
    const double c = std::cos(angle);
    return std::sin(alpha * angle) / std::pow(c, 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * angle) / exponential, (1.0 - alpha) / alpha);
}

StableIncrementSampler::StableIncrementSampler(const StableParams& params, double dt,
                                               SplitMix64 rng, bool mirrored)
    : alpha_(params.alpha), scale_(0.0), rng_(rng), mirrored_(mirrored) {
    params.validate();
    if (!(dt > 0.0)) {
        throw DomainError("time step must be positive");
    }
    scale_ = params.epsilon * std::pow(dt, 1.0 / params.alpha);
}

double StableIncrementSampler::next_standard() {
    double angle = std::numbers::pi * (rng_.uniform_open() - 0.5);
    if (mirrored_) {
        angle = -angle;
    }
    const double exponential = -std::log(rng_.uniform_open());
    return cms_variate(alpha_, angle, exponential);
}

double StableIncrementSampler::next() {
    const double z = next_standard();
    return scale_ == 0.0 ? 0.0 : scale_ * z;
}

std::vector<double> sample_stable_increments(const StableParams& params, double dt,
                                             std::size_t n, std::uint64_t seed) {
    StableIncrementSampler sampler(params, dt, SplitMix64(seed));
    std::vector<double> out(n);
    for (auto& v : out) {
        v = sampler.next();
    }
    return out;
}

}  // namespace levyfilter
