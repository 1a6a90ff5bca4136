#pragma once

// Reference values computed outside this code base. The mpmath script
// generate_oracles.py in this directory regenerates the frozen constants.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

// C_alpha at 40 digits (mpmath), and its alpha-derivative (mpmath diff).
struct LevyConstantRef {
    double alpha;
    double value;
    double slope;
};
inline const std::vector<LevyConstantRef> kLevyConstants = {
    {0.1, 0.04737216601893941108, 0.44974484221836006},
    {0.5, 0.19947114020071633897, 0.32060723104427619},
    {0.75, 0.27027789764008596257, 0.24274133563481102},
    {1.0, 0.31830988618379067154, 0.13457643358548269},
    {1.5, 0.29920671030107450845, -0.25960361621949456},
    {1.9, 0.090992482475194496492, -0.82212779233705924},
};

// Nonlocal operator (eps = 1) applied to the standard normal density at x = 0:
//   C_alpha int_0^inf [phi(y) + phi(-y) - 2 phi(0)] y^-(1+alpha) dy
//   = C_alpha sqrt(2/pi) 2^(-alpha/2 - 1) Gamma(-alpha/2),
// closed form evaluated with mpmath.
inline constexpr double kGaussianBumpAt0_alpha15 = -0.34310631377966308;
inline constexpr double kGaussianBumpAt0_alpha10 = -0.31830988618379067;
inline constexpr double kGaussianBumpAt0_alpha075 = -0.31806020946176063;

// Transition density of the standard 1-stable (Cauchy) process from 0.
inline double cauchy_density(double x, double t) {
    return t / (std::numbers::pi * (x * x + t * t));
}

// Characteristic function of a standard symmetric alpha-stable law.
inline double stable_cf(double xi, double alpha) { return std::exp(-std::pow(std::abs(xi), alpha)); }

// Real part of the empirical characteristic function (the imaginary part of
// a symmetric law vanishes; the modulus is compared by callers that need it).
inline double empirical_cf_modulus(const std::vector<double>& xs, double xi) {
    double c = 0.0, s = 0.0;
    for (double x : xs) {
        c += std::cos(xi * x);
        s += std::sin(xi * x);
    }
    const double n = static_cast<double>(xs.size());
    return std::abs(std::complex<double>(c / n, s / n));
}

// Max deviation over xi of the complex empirical CF from exp(-|xi|^alpha).
inline double max_cf_deviation(const std::vector<double>& xs, double alpha,
                               const std::vector<double>& xis) {
    double worst = 0.0;
    for (double xi : xis) {
        double c = 0.0, s = 0.0;
        for (double x : xs) {
            c += std::cos(xi * x);
            s += std::sin(xi * x);
        }
        const double n = static_cast<double>(xs.size());
        worst = std::max(worst, std::abs(std::complex<double>(c / n - stable_cf(xi, alpha), s / n)));
    }
    return worst;
}

// Posterior mean of a N(mu, s2) prior observed through y = x + N(0, r).
inline double conjugate_mean(double mu, double s2, double r, double y) {
    return (s2 * y + r * mu) / (s2 + r);
}
inline double conjugate_variance(double s2, double r) { return s2 * r / (s2 + r); }

// Exact solution of x' = 4 (x - x^3).
inline double double_well_flow(double x0, double t) {
    const double e = std::exp(8.0 * t);
    return x0 * std::exp(4.0 * t) / std::sqrt(1.0 - x0 * x0 + x0 * x0 * e);
}

}  // namespace oracle
