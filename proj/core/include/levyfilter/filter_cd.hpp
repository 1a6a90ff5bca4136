#pragma once

#include <cstddef>
#include <vector>

#include "levyfilter/density.hpp"
#include "levyfilter/fp_solver.hpp"
#include "levyfilter/functions.hpp"

namespace levyfilter {

/// y_k = h(x_k, t_k) + sqrt(R_k) v_k with v_k i.i.d. standard normal.
struct DiscreteObservations {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> variances;
    ObservationFn h = identity_observation();

    std::size_t size() const noexcept { return times.size(); }
    /// Equal lengths, strictly increasing times, R_k > 0.
    void validate() const;
};

/// (2 pi R)^(-1/2) exp(-(y - h(x,t))^2 / (2R)).
double gaussian_likelihood(double y, double x, double t, double r, const ObservationFn& h);
double log_gaussian_likelihood(double y, double x, double t, double r, const ObservationFn& h);

/// Posterior likelihood * prior / int likelihood * prior, evaluated in log space
/// with the likelihood shifted by its maximum over the prior's support.
/// DegenerateEvidenceError when the prior has no mass or the evidence is not finite.
/// `log_evidence`, when given, receives log int p(y|x) p(x) dx.
DensityField bayes_update(const DensityField& prior, double y, double t, double r,
                          const ObservationFn& h, double* log_evidence = nullptr);

struct CdFilterOptions {
    std::size_t store_stride = 10;
    DriftScheme scheme = DriftScheme::Hybrid;
    StepDiagnostics* diagnostics = nullptr;
};

/// Continuous-discrete filter: forward Euler Fokker-Planck steps between
/// observation instants, Bayes update at each t_k. Observation times must sit
/// on the step lattice t0 + k dt (relative tolerance 1e-6 of dt). The
/// evolution stores snapshots at t0, every `store_stride` steps, the posterior
/// at every t_k and the final time; the pre-update density at each t_k is kept
/// in DensityEvolution::updates().
DensityEvolution run_cd_filter(const DensityField& p0, const DiscreteObservations& obs,
                               const DriftFn& drift, const StableParams& params, double t0,
                               double dt, double t_end, const CdFilterOptions& options = {});

}  // namespace levyfilter
