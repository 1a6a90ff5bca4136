#pragma once

#include <cstddef>

#include "levyfilter/density.hpp"
#include "levyfilter/functions.hpp"
#include "levyfilter/levy.hpp"
#include "levyfilter/nonlocal_operator.hpp"

namespace levyfilter {

/// Accumulated clipping statistics of explicit steps.
struct StepDiagnostics {
    std::size_t steps = 0;
    /// Sum over steps of dx * sum_i max(-p_i, 0) before clipping.
    double clipped_mass = 0.0;
    /// Largest single-step clipped mass relative to the field's mass.
    double max_relative_clip = 0.0;

    void merge(const StepDiagnostics& other);
};

/// 2 / max_i |A*_ii|, +infinity for an operator with zero diagonal.
double stability_limit(const OperatorMatrix& op);

/// Clips negatives of a freshly stepped field, recording them in `diag`, and
/// throws InstabilityError if any value exceeds 10x the previous maximum.
void clip_and_guard(std::vector<double>& next, double previous_max, double dx,
                    StepDiagnostics* diag);

/// One forward Euler step p + dt A* p. InstabilityError when dt exceeds
/// stability_limit(op) or the blow-up guard trips.
DensityField step_fp(const DensityField& p, const OperatorMatrix& op, double dt,
                     StepDiagnostics* diag = nullptr);

struct FpOptions {
    DriftScheme scheme = DriftScheme::Hybrid;
    StepDiagnostics* diagnostics = nullptr;
};

/// Integrates p_t = A* p from t0 to t1. Snapshots at t0, every `store_stride`
/// steps and at t1; the last step is shortened to land exactly on t1.
DensityEvolution solve_fp(const DensityField& p0, const DriftFn& drift, const StableParams& params,
                          double t0, double t1, double dt, std::size_t store_stride,
                          const FpOptions& options = {});

/// Same, with a pre-assembled operator (reassembled per step only for a
/// time-dependent drift).
DensityEvolution solve_fp(const DensityField& p0, const OperatorMatrix& op, const DriftFn& drift,
                          double t0, double t1, double dt, std::size_t store_stride,
                          StepDiagnostics* diagnostics = nullptr);

/// Number of steps of length dt covering [t0, t1], counting a final partial step.
std::size_t step_count(double t0, double t1, double dt);

}  // namespace levyfilter
