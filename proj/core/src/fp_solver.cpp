#include "levyfilter/fp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyfilter/errors.hpp"

namespace levyfilter {

void StepDiagnostics::merge(const StepDiagnostics& other) {
    steps += other.steps;
    clipped_mass += other.clipped_mass;
    max_relative_clip = std::max(max_relative_clip, other.max_relative_clip);
}

double stability_limit(const OperatorMatrix& op) { return op.stability_limit(); }

void clip_and_guard(std::vector<double>& next, double previous_max, double dx,
                    StepDiagnostics* diag) {
    double clipped = 0.0;
    double total = 0.0;
    double peak = 0.0;
    for (double& v : next) {
        if (!std::isfinite(v)) {
            throw InstabilityError("non-finite density value after explicit step");
        }
        peak = std::max(peak, v);
        if (v < 0.0) {
            clipped -= v;
            v = 0.0;
        } else {
            total += v;
        }
    }
    if (previous_max > 0.0 && peak > 10.0 * previous_max) {
        std::ostringstream msg;
        msg << "explicit step blew up: max density " << peak << " exceeds 10x the previous max "
            << previous_max;
        throw InstabilityError(msg.str());
    }
    if (diag) {
        diag->steps += 1;
        diag->clipped_mass += clipped * dx;
        if (total > 0.0) {
            diag->max_relative_clip = std::max(diag->max_relative_clip, clipped / total);
        }
    }
}

DensityField step_fp(const DensityField& p, const OperatorMatrix& op, double dt,
                     StepDiagnostics* diag) {
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
    if (dt == 0.0) {
        return p;
    }
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::Map<const Eigen::VectorXd> current(p.values().data(), n);
    std::vector<double> next(p.size());
    Eigen::Map<Eigen::VectorXd> out(next.data(), n);
    out.noalias() = current + dt * (op.matrix() * current);

    const double previous_max = current.maxCoeff();
    clip_and_guard(next, previous_max, p.grid().dx(), diag);
    return DensityField(p.grid(), std::move(next), false);
}

std::size_t step_count(double t0, double t1, double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("time step must be positive");
    }
    if (t1 <= t0) return 0;
    const double steps = (t1 - t0) / dt;
    return static_cast<std::size_t>(std::ceil(steps - 1e-9));
}

DensityEvolution solve_fp(const DensityField& p0, const OperatorMatrix& op, const DriftFn& drift,
                          double t0, double t1, double dt, std::size_t store_stride,
                          StepDiagnostics* diagnostics) {
    if (t1 < t0) {
        throw DomainError("solve_fp needs t1 >= t0");
    }
    const std::size_t stride = std::max<std::size_t>(store_stride, 1);
    DensityEvolution evo(p0.grid(), stride);
    evo.push(t0, p0);
    const std::size_t steps = step_count(t0, t1, dt);

    OperatorMatrix current_op = op;
    DensityField p = p0;
    double t = t0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_next = (k == steps) ? t1 : t0 + static_cast<double>(k) * dt;
        if (drift.time_dependent) {
            current_op = reassemble_drift(op, drift, t);
        }
        p = step_fp(p, current_op, t_next - t, diagnostics);
        t = t_next;
        if (k % stride == 0 || k == steps) {
            evo.push(t, p);
        }
    }
    return evo;
}

DensityEvolution solve_fp(const DensityField& p0, const DriftFn& drift, const StableParams& params,
                          double t0, double t1, double dt, std::size_t store_stride,
                          const FpOptions& options) {
    const OperatorMatrix op = assemble_adjoint(p0.grid(), params, drift, t0, options.scheme);
    return solve_fp(p0, op, drift, t0, t1, dt, store_stride, options.diagnostics);
}

}  // namespace levyfilter
