#include "levyfilter/filter_zakai.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyfilter/errors.hpp"

namespace levyfilter {

double ContinuousObservationPath::dt_obs() const {
    if (times.size() < 2) {
        throw DomainError("observation path needs at least two samples");
    }
    return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

void ContinuousObservationPath::validate() const {
    if (times.size() != y_values.size()) {
        throw DomainError("observation path times and values differ in length");
    }
    const double step = dt_obs();
    if (!(step > 0.0)) {
        throw DomainError("observation path times must increase");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double d = times[k] - times[k - 1];
        if (std::abs(d - step) > 1e-9 * std::max(1.0, step) + 1e-12) {
            throw DomainError("observation path times are not uniform");
        }
    }
    for (double y : y_values) {
        if (!std::isfinite(y)) {
            throw DomainError("observation path contains a non-finite value");
        }
    }
    if (!(obs_noise_scale > 0.0)) {
        throw DomainError("observation noise scale must be positive");
    }
}

std::string to_string(ZakaiGain gain) {
    return gain == ZakaiGain::Likelihood ? "likelihood" : "unit";
}

ZakaiGain zakai_gain_from_string(const std::string& name) {
    if (name == "likelihood") return ZakaiGain::Likelihood;
    if (name == "unit") return ZakaiGain::Unit;
    throw DomainError("unknown zakai gain '" + name + "' (expected likelihood or unit)");
}

DensityField step_zakai(const DensityField& p, const OperatorMatrix& op, const ObservationFn& h,
                        double t, double dY, double dt, double gain, StepDiagnostics* diag) {
    if (!(p.grid() == op.grid())) {
        throw AxisMismatchError("density and operator live on different grids");
    }
    if (dt < 0.0) {
        throw DomainError("time step must be non-negative");
    }
    if (dt > op.stability_limit()) {
        std::ostringstream msg;
        msg << "time step " << dt << " exceeds the explicit stability limit "
            << op.stability_limit();
        throw InstabilityError(msg.str());
    }
    if (!std::isfinite(dY)) {
        throw DomainError("observation increment is not finite");
    }
    const Grid1D& grid = p.grid();
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::Map<const Eigen::VectorXd> current(p.values().data(), n);
    std::vector<double> next(p.size());
    Eigen::Map<Eigen::VectorXd> out(next.data(), n);
    if (dt > 0.0) {
        out.noalias() = current + dt * (op.matrix() * current);
    } else {
        out = current;
    }
    if (dY != 0.0) {
        const double g = gain * dY;
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i) += g * h(grid.node(static_cast<std::size_t>(i)), t) * current(i);
        }
    }
    clip_and_guard(next, current.maxCoeff(), grid.dx(), diag);
    return DensityField(grid, std::move(next), false);
}

DensityEvolution run_zakai(const DensityField& p0, const ContinuousObservationPath& obs,
                           const DriftFn& drift, const StableParams& params,
                           const ZakaiOptions& options) {
    obs.validate();
    const double dt_obs = obs.dt_obs();
    const double ratio = dt_obs / options.dt;
    const double sub = std::round(ratio);
    if (!(options.dt > 0.0) || sub < 1.0 || std::abs(ratio - sub) > 1e-6 * sub) {
        std::ostringstream msg;
        msg << "solver step " << options.dt << " must divide the observation spacing " << dt_obs;
        throw DomainError(msg.str());
    }
    const auto substeps = static_cast<std::size_t>(sub);
    const std::size_t renorm = std::max<std::size_t>(options.renormalize_every, 1);
    const std::size_t stride = std::max<std::size_t>(options.store_stride, 1);
    const double gain = options.gain == ZakaiGain::Likelihood
                            ? 1.0 / (obs.obs_noise_scale * obs.obs_noise_scale)
                            : 1.0;

    const double t0 = obs.times.front();
    const OperatorMatrix base = assemble_adjoint(p0.grid(), params, drift, t0, options.scheme);
    OperatorMatrix op = base;

    DensityEvolution evo(p0.grid(), stride);
    DensityField p = p0;
    double log_scale = 0.0;  // log of the factor divided out so far

    auto store = [&](double t) {
        DensityField snap = p;
        const double m = snap.normalize();
        evo.push(t, std::move(snap), log_scale + std::log(m));
    };
    store(t0);

    std::size_t step = 0;
    const std::size_t total = (obs.size() - 1) * substeps;
    for (std::size_t k = 0; k + 1 < obs.size(); ++k) {
        const double dY = (obs.y_values[k + 1] - obs.y_values[k]) / static_cast<double>(substeps);
        for (std::size_t s = 0; s < substeps; ++s) {
            const double t = t0 + static_cast<double>(step) * options.dt;
            if (drift.time_dependent) {
                op = reassemble_drift(base, drift, t);
            }
            p = step_zakai(p, op, obs.h, t, dY, options.dt, gain, options.diagnostics);
            ++step;
            if (step % renorm == 0) {
                log_scale += std::log(p.normalize());
                p.set_normalized(false);
            }
            if (step % stride == 0 || step == total) {
                const double t_now =
                    step == total ? obs.times.back() : t0 + static_cast<double>(step) * options.dt;
                store(t_now);
            }
        }
    }
    return evo;
}

}  // namespace levyfilter
