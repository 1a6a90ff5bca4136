#pragma once

#include <string>

#include <cstddef>
#include <vector>

#include "levyfilter/density.hpp"
#include "levyfilter/fp_solver.hpp"
#include "levyfilter/functions.hpp"

namespace levyfilter {

/// Cumulative observation process of dY = h(X,t) dt + scale dW, sampled on a
/// uniform time grid.
struct ContinuousObservationPath {
    std::vector<double> times;
    std::vector<double> y_values;
    double obs_noise_scale = 1.0;
    ObservationFn h = identity_observation();

    std::size_t size() const noexcept { return times.size(); }
    double dt_obs() const;
    /// At least two samples, uniform spacing (1e-9 relative), finite values, scale > 0.
    void validate() const;
};

/// One Euler step of the Zakai equation
///   p <- p + dt A* p + gain h(x, t) p dY,
/// negatives clipped as in step_fp. gain = 1 is the unit-noise form
/// dp = A* p dt + h p dY; run_zakai passes 1 / scale^2.
DensityField step_zakai(const DensityField& p, const OperatorMatrix& op, const ObservationFn& h,
                        double t, double dY, double dt, double gain = 1.0,
                        StepDiagnostics* diag = nullptr);

/// Weight of the observation term. Likelihood uses 1 / scale^2, the
/// innovation gain of dY = h dt + scale dW. Unit uses 1 as in the unit-noise
/// equation dp = A* p dt + h p dY, whatever the scale.
enum class ZakaiGain { Likelihood, Unit };

std::string to_string(ZakaiGain gain);
ZakaiGain zakai_gain_from_string(const std::string& name);

struct ZakaiOptions {
    /// Solver step; must divide the observation spacing.
    double dt = 1e-3;
    std::size_t renormalize_every = 1;
    std::size_t store_stride = 10;
    DriftScheme scheme = DriftScheme::Hybrid;
    ZakaiGain gain = ZakaiGain::Likelihood;
    StepDiagnostics* diagnostics = nullptr;
};

/// Integrates the Zakai equation over the observation path. Each observation
/// increment is split evenly across the solver sub-steps it spans. The
/// unnormalized field is rescaled to unit mass every `renormalize_every` steps;
/// snapshots are stored normalized, with log_norm() holding the log of the
/// unnormalized mass at that time.
DensityEvolution run_zakai(const DensityField& p0, const ContinuousObservationPath& obs,
                           const DriftFn& drift, const StableParams& params,
                           const ZakaiOptions& options = {});

}  // namespace levyfilter
