#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "levyfilter/rng.hpp"

namespace levyfilter {

/// Symmetric alpha-stable noise entering the state equation as epsilon * dL^alpha.
struct StableParams {
    double alpha = 1.5;
    double epsilon = 1.0;

    /// Throws DomainError unless 0 < alpha < 2 and epsilon >= 0.
    void validate() const;
    /// epsilon^alpha, the factor the noise intensity contributes to the jump measure.
    double intensity() const;
};

/// C_alpha = alpha Gamma((1+alpha)/2) / (2^(1-alpha) sqrt(pi) Gamma(1-alpha/2)).
double levy_constant(double alpha);

/// nu_alpha(dy) = C_alpha |y|^-(1+alpha) dy.
class JumpMeasure {
public:
    explicit JumpMeasure(double alpha);

    double alpha() const noexcept { return alpha_; }
    double c_alpha() const noexcept { return c_alpha_; }

    /// Density of the measure at y; DomainError at y = 0.
    double density(double y) const;

private:
    double alpha_;
    double c_alpha_;
};

double jump_density(const JumpMeasure& measure, double y);

/// Chambers-Mallows-Stuck map for a standard symmetric stable variate
/// (characteristic function exp(-|xi|^alpha)). `angle` lies in (-pi/2, pi/2)
/// and `exponential` is a unit-rate exponential variate. Odd in `angle`.
double cms_variate(double alpha, double angle, double exponential);

/// Stateful source of epsilon * (L_{t+dt} - L_t) increments.
class StableIncrementSampler {
public:
    /// `mirrored` negates the angle stream, which negates every draw.
    StableIncrementSampler(const StableParams& params, double dt, SplitMix64 rng,
                           bool mirrored = false);

    double next();
    /// A standard (epsilon = 1, dt = 1) draw from the same stream.
    double next_standard();

    double scale() const noexcept { return scale_; }

private:
    double alpha_;
    double scale_;
    SplitMix64 rng_;
    bool mirrored_;
};

/// n i.i.d. increments of epsilon L^alpha over steps of length dt, scaled by
/// epsilon * dt^(1/alpha). Fully determined by `seed`.
std::vector<double> sample_stable_increments(const StableParams& params, double dt,
                                             std::size_t n, std::uint64_t seed);

}  // namespace levyfilter
