#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "levyfilter/functions.hpp"
#include "levyfilter/grid.hpp"
#include "levyfilter/levy.hpp"

namespace levyfilter {

/// Flux discretization of -d/dx (f p).
///
/// Central: F_{i+1/2} = (f_i p_i + f_{i+1} p_{i+1}) / 2, second order but not
///   sign preserving when |f| dx / 2 exceeds the diffusive coupling.
/// Upwind: donor cell with f evaluated at the interface, first order, monotone.
/// Hybrid: central on interfaces where |f| <= 2 dx w1 (w1 = nearest-neighbour
///   nonlocal weight), upwind elsewhere. Keeps the M-matrix sign pattern.
///
/// All schemes treat the two domain-boundary interfaces as outflow-only, since
/// the exterior density is zero.
enum class DriftScheme { Hybrid, Central, Upwind };

std::string to_string(DriftScheme scheme);
DriftScheme drift_scheme_from_string(const std::string& name);

/// Dense discretization of the adjoint generator A* on a Grid1D, kept as a
/// nonlocal part and a drift part. Immutable; parts are shared between copies.
class OperatorMatrix {
public:
    struct Metadata {
        double alpha = 0.0;
        double epsilon = 0.0;
        double drift_time = 0.0;
        std::string drift_name = "none";
        DriftScheme scheme = DriftScheme::Hybrid;
    };

    /// Zero operator on `grid`.
    explicit OperatorMatrix(const Grid1D& grid);

    OperatorMatrix(const Grid1D& grid, std::shared_ptr<const Eigen::MatrixXd> nonlocal,
                   std::shared_ptr<const Eigen::VectorXd> exterior,
                   std::shared_ptr<const Eigen::MatrixXd> drift, Metadata meta);

    const Grid1D& grid() const noexcept { return grid_; }
    const Metadata& metadata() const noexcept { return meta_; }

    bool has_nonlocal() const noexcept { return static_cast<bool>(nonlocal_); }
    bool has_drift() const noexcept { return static_cast<bool>(drift_); }

    /// Nonlocal part; a zero matrix when absent.
    const Eigen::MatrixXd& nonlocal_part() const;
    const Eigen::MatrixXd& drift_part() const;
    /// Sum of both parts.
    const Eigen::MatrixXd& matrix() const noexcept { return *full_; }

    /// Weight row i of the nonlocal stencil places on values outside the
    /// domain (shifts past either end, the p'' ghost neighbour, the far tail).
    /// For a function extended by a constant c, the free-space result is
    /// nonlocal_part() * p + c * exterior_weights().
    const Eigen::VectorXd& exterior_weights() const;

    /// Same nonlocal part, new drift part.
    OperatorMatrix with_drift(std::shared_ptr<const Eigen::MatrixXd> drift, double t,
                              std::string drift_name, DriftScheme scheme) const;

    /// A* p.
    Eigen::VectorXd apply(const Eigen::VectorXd& p) const { return *full_ * p; }

    /// Largest explicit Euler step, 2 / max_i |A*_ii|; +infinity for a zero diagonal.
    double stability_limit() const noexcept { return stability_limit_; }

private:
    Grid1D grid_;
    std::shared_ptr<const Eigen::MatrixXd> nonlocal_;
    std::shared_ptr<const Eigen::VectorXd> exterior_;
    std::shared_ptr<const Eigen::MatrixXd> drift_;
    std::shared_ptr<const Eigen::MatrixXd> full_;
    Metadata meta_;
    double stability_limit_;
};

/// Nonlocal part of A*: C_alpha eps^alpha times the symmetrized integral
///   int_0^inf [p(x+y) + p(x-y) - 2 p(x)] y^-(1+alpha) dy
/// with p = 0 outside the grid. Trapezoidal rule on shifts y = j dx up to the
/// domain width W, the singular end corrected by -zeta(alpha-1) dx^(2-alpha) p''(x),
/// and the -2p(x) tail beyond W integrated exactly. The result is a symmetric
/// Toeplitz matrix; it equals eps^alpha times the eps = 1 matrix entrywise.
OperatorMatrix assemble_nonlocal(const Grid1D& grid, const StableParams& params);

/// Drift part -d/dx (f(., t) p). `coupling` is the nearest-neighbour nonlocal
/// weight used by the hybrid switch (ignored by the other schemes).
OperatorMatrix assemble_drift_divergence(const Grid1D& grid, const DriftFn& drift, double t,
                                         DriftScheme scheme = DriftScheme::Central,
                                         double coupling = 0.0);

/// Full A* = drift part + nonlocal part at time t.
OperatorMatrix assemble_adjoint(const Grid1D& grid, const StableParams& params,
                                const DriftFn& drift, double t,
                                DriftScheme scheme = DriftScheme::Hybrid);

/// Re-discretize only the drift of `op` at time t (the nonlocal part is reused).
OperatorMatrix reassemble_drift(const OperatorMatrix& op, const DriftFn& drift, double t);

/// Generator A applied to phi, discretized as the transpose of A*: the drift
/// enters as f phi' and the nonlocal part is the same symmetric stencil.
Eigen::VectorXd apply_generator(const Grid1D& grid, const StableParams& params,
                                const DriftFn& drift, double t, const Eigen::VectorXd& phi,
                                DriftScheme scheme = DriftScheme::Hybrid);

/// Debug dump: header `row,col,value`, one line per nonzero of matrix().
void write_operator_csv(std::ostream& out, const OperatorMatrix& op);

}  // namespace levyfilter
