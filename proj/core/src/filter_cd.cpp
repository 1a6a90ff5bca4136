#include "levyfilter/filter_cd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "levyfilter/errors.hpp"

namespace levyfilter {

void DiscreteObservations::validate() const {
    if (values.size() != times.size() || variances.size() != times.size()) {
        throw DomainError("observation times, values and variances differ in length");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw DomainError("observation times must be strictly increasing");
        }
        if (!(variances[k] > 0.0) || !std::isfinite(variances[k])) {
            throw DomainError("observation variance R_k must be positive and finite");
        }
        if (!std::isfinite(values[k])) {
            throw DomainError("observation value is not finite");
        }
    }
}

double log_gaussian_likelihood(double y, double x, double t, double r, const ObservationFn& h) {
    if (!(r > 0.0)) {
        throw DomainError("likelihood variance must be positive");
    }
    const double e = y - h(x, t);
    return -0.5 * std::log(2.0 * std::numbers::pi * r) - 0.5 * e * e / r;
}

double gaussian_likelihood(double y, double x, double t, double r, const ObservationFn& h) {
    return std::exp(log_gaussian_likelihood(y, x, t, r, h));
}

DensityField bayes_update(const DensityField& prior, double y, double t, double r,
                          const ObservationFn& h, double* log_evidence) {
    const Grid1D& grid = prior.grid();
    const std::size_t n = prior.size();
    std::vector<double> log_like(n);
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        log_like[i] = log_gaussian_likelihood(y, grid.node(i), t, r, h);
        if (prior[i] > 0.0) {
            shift = std::max(shift, log_like[i]);
        }
    }
    if (!std::isfinite(shift)) {
        throw DegenerateEvidenceError("prior has no mass on the grid; Bayes update undefined");
    }
    std::vector<double> post(n);
    for (std::size_t i = 0; i < n; ++i) {
        post[i] = prior[i] > 0.0 ? prior[i] * std::exp(log_like[i] - shift) : 0.0;
    }
    DensityField field(grid, std::move(post));
    const double denom = field.mass();
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        std::ostringstream msg;
        msg << "evidence for observation y=" << y << " at t=" << t << " vanished";
        throw DegenerateEvidenceError(msg.str());
    }
    if (log_evidence) {
        *log_evidence = std::log(denom) + shift - std::log(prior.mass());
    }
    field.normalize();
    return field;
}

DensityEvolution run_cd_filter(const DensityField& p0, const DiscreteObservations& obs,
                               const DriftFn& drift, const StableParams& params, double t0,
                               double dt, double t_end, const CdFilterOptions& options) {
    obs.validate();
    if (t_end < t0) {
        throw DomainError("filter end time precedes its start time");
    }
    const std::size_t steps = step_count(t0, t_end, dt);
    const std::size_t stride = std::max<std::size_t>(options.store_stride, 1);

    // Step index of every observation.
    std::vector<std::size_t> obs_step(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        const double tk = obs.times[k];
        if (tk < t0 - 1e-12 || tk > t_end + 1e-12) {
            std::ostringstream msg;
            msg << "observation time " << tk << " outside [" << t0 << ", " << t_end << "]";
            throw DomainError(msg.str());
        }
        const double s = (tk - t0) / dt;
        const double rounded = std::round(s);
        if (std::abs(s - rounded) > 1e-6 && !(k + 1 == obs.size() && tk == t_end)) {
            std::ostringstream msg;
            msg << "observation time " << tk << " is not on the time-step lattice (dt=" << dt << ")";
            throw DomainError(msg.str());
        }
        obs_step[k] = std::min(static_cast<std::size_t>(rounded), steps);
    }

    const OperatorMatrix base = assemble_adjoint(p0.grid(), params, drift, t0, options.scheme);
    OperatorMatrix op = base;

    DensityEvolution evo(p0.grid(), stride);
    DensityField p = p0;
    std::size_t next_obs = 0;

    auto assimilate = [&](std::size_t step, double t) -> bool {
        bool updated = false;
        while (next_obs < obs.size() && obs_step[next_obs] == step) {
            DensityField prior = p;
            double log_ev = 0.0;
            try {
                p = bayes_update(p, obs.values[next_obs], obs.times[next_obs],
                                 obs.variances[next_obs], obs.h, &log_ev);
            } catch (const DegenerateEvidenceError& e) {
                std::ostringstream msg;
                msg << "Bayes update at t_k=" << obs.times[next_obs] << ": " << e.what();
                throw DegenerateEvidenceError(msg.str());
            }
            evo.add_update(UpdateRecord{t, std::move(prior), log_ev, evo.size()});
            ++next_obs;
            updated = true;
        }
        return updated;
    };

    assimilate(0, t0);
    evo.push(t0, p);

    double t = t0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_next = (k == steps) ? t_end : t0 + static_cast<double>(k) * dt;
        if (drift.time_dependent) {
            op = reassemble_drift(base, drift, t);
        }
        try {
            p = step_fp(p, op, t_next - t, options.diagnostics);
        } catch (const InstabilityError& e) {
            std::ostringstream msg;
            msg << "Fokker-Planck step ending at t=" << t_next << ": " << e.what();
            throw InstabilityError(msg.str());
        }
        t = t_next;
        const bool updated = assimilate(k, t);
        if (updated || k % stride == 0 || k == steps) {
            evo.push(t, p);
        }
    }
    return evo;
}

}  // namespace levyfilter
