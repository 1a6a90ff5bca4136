#include "levyfilter/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "levyfilter/errors.hpp"

namespace levyfilter {

namespace {

double diagonal_limit(const Eigen::MatrixXd& m) {
    const double d = m.diagonal().cwiseAbs().maxCoeff();
    return d > 0.0 ? 2.0 / d : std::numeric_limits<double>::infinity();
}

std::shared_ptr<const Eigen::MatrixXd> zero_matrix(std::size_t n) {
    const auto s = static_cast<Eigen::Index>(n);
    return std::make_shared<const Eigen::MatrixXd>(Eigen::MatrixXd::Zero(s, s));
}

}  // namespace

std::string to_string(DriftScheme scheme) {
    switch (scheme) {
        case DriftScheme::Hybrid: return "hybrid";
        case DriftScheme::Central: return "central";
        case DriftScheme::Upwind: return "upwind";
    }
    return "unknown";
}

DriftScheme drift_scheme_from_string(const std::string& name) {
    if (name == "hybrid") return DriftScheme::Hybrid;
    if (name == "central") return DriftScheme::Central;
    if (name == "upwind") return DriftScheme::Upwind;
    throw DomainError("unknown drift scheme '" + name + "' (expected hybrid, central or upwind)");
}

OperatorMatrix::OperatorMatrix(const Grid1D& grid)
    : OperatorMatrix(grid, nullptr, nullptr, nullptr, Metadata{}) {}

OperatorMatrix::OperatorMatrix(const Grid1D& grid, std::shared_ptr<const Eigen::MatrixXd> nonlocal,
                               std::shared_ptr<const Eigen::VectorXd> exterior,
                               std::shared_ptr<const Eigen::MatrixXd> drift, Metadata meta)
    : grid_(grid),
      nonlocal_(std::move(nonlocal)),
      exterior_(std::move(exterior)),
      drift_(std::move(drift)),
      meta_(std::move(meta)) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    for (const auto* part : {nonlocal_.get(), drift_.get()}) {
        if (part && (part->rows() != n || part->cols() != n)) {
            throw AxisMismatchError("operator part does not match the grid size");
        }
    }
    if (nonlocal_ && drift_) {
        full_ = std::make_shared<const Eigen::MatrixXd>(*nonlocal_ + *drift_);
    } else if (nonlocal_) {
        full_ = nonlocal_;
    } else if (drift_) {
        full_ = drift_;
    } else {
        full_ = zero_matrix(grid_.size());
    }
    if (!exterior_) {
        exterior_ = std::make_shared<const Eigen::VectorXd>(Eigen::VectorXd::Zero(n));
    }
    stability_limit_ = diagonal_limit(*full_);
}

const Eigen::MatrixXd& OperatorMatrix::nonlocal_part() const {
    if (!nonlocal_) {
        static thread_local std::shared_ptr<const Eigen::MatrixXd> zero;
        if (!zero || zero->rows() != static_cast<Eigen::Index>(grid_.size())) {
            zero = zero_matrix(grid_.size());
        }
        return *zero;
    }
    return *nonlocal_;
}

const Eigen::MatrixXd& OperatorMatrix::drift_part() const {
    if (!drift_) {
        static thread_local std::shared_ptr<const Eigen::MatrixXd> zero;
        if (!zero || zero->rows() != static_cast<Eigen::Index>(grid_.size())) {
            zero = zero_matrix(grid_.size());
        }
        return *zero;
    }
    return *drift_;
}

const Eigen::VectorXd& OperatorMatrix::exterior_weights() const { return *exterior_; }

OperatorMatrix OperatorMatrix::with_drift(std::shared_ptr<const Eigen::MatrixXd> drift, double t,
                                          std::string drift_name, DriftScheme scheme) const {
    Metadata meta = meta_;
    meta.drift_time = t;
    meta.drift_name = std::move(drift_name);
    meta.scheme = scheme;
    return OperatorMatrix(grid_, nonlocal_, exterior_, std::move(drift), std::move(meta));
}

OperatorMatrix assemble_nonlocal(const Grid1D& grid, const StableParams& params) {
    params.validate();
    const double alpha = params.alpha;
    const double h = grid.dx();
    const std::size_t n = grid.size();
    const std::size_t max_shift = n - 1;
    const double width = grid.width();
    const double c_alpha = levy_constant(alpha);

    // Weights for epsilon = 1; the intensity epsilon^alpha multiplies last.
    std::vector<double> shift_weight(max_shift + 1, 0.0);
    for (std::size_t j = 1; j <= max_shift; ++j) {
        const double w = (j == max_shift) ? 0.5 : 1.0;
        shift_weight[j] = c_alpha * h * w * std::pow(static_cast<double>(j) * h, -(1.0 + alpha));
    }
    // int_0^dx of p''(x) y^(1-alpha) dy, corrected for the trapezoid's
    // omitted origin node (generalized Euler-Maclaurin, Navot).
    const double inner = -c_alpha * std::riemann_zeta(alpha - 1.0) * std::pow(h, -alpha);
    const double far_tail = 2.0 * c_alpha * std::pow(width, -alpha) / alpha;

    double total_shift = 0.0;
    for (std::size_t j = 1; j <= max_shift; ++j) {
        total_shift += shift_weight[j];
    }
    const double diag = -2.0 * total_shift - 2.0 * inner - far_tail;

    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd unit(size, size);
    Eigen::VectorXd exterior(size);
    for (std::size_t i = 0; i < n; ++i) {
        double outside = far_tail;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) {
                unit(i, k) = diag;
                continue;
            }
            const std::size_t j = k > i ? k - i : i - k;
            unit(i, k) = shift_weight[j] + (j == 1 ? inner : 0.0);
        }
        // Shifts that leave the domain: j > n-1-i to the right, j > i to the left.
        for (std::size_t j = n - i; j <= max_shift; ++j) {
            outside += shift_weight[j];
        }
        for (std::size_t j = i + 1; j <= max_shift; ++j) {
            outside += shift_weight[j];
        }
        if (i == 0 || i == n - 1) {
            outside += inner;
        }
        exterior(static_cast<Eigen::Index>(i)) = outside;
    }

    const double intensity = params.intensity();
    OperatorMatrix::Metadata meta;
    meta.alpha = alpha;
    meta.epsilon = params.epsilon;
    return OperatorMatrix(grid, std::make_shared<const Eigen::MatrixXd>(intensity * unit),
                          std::make_shared<const Eigen::VectorXd>(intensity * exterior), nullptr,
                          meta);
}

namespace {

std::shared_ptr<const Eigen::MatrixXd> drift_matrix(const Grid1D& grid, const DriftFn& drift,
                                                    double t, DriftScheme scheme,
                                                    double coupling) {
    const std::size_t n = grid.size();
    const double h = grid.dx();
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size, size);

    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = drift(grid.node(i), t);
        if (!std::isfinite(f[i])) {
            throw DomainError("drift '" + drift.name + "' is not finite on the grid");
        }
    }

    // Flux through the interface between node l = i-1 and node r = i adds
    // -F/h to row l and +F/h to row r.
    auto add_flux = [&](std::ptrdiff_t l, std::ptrdiff_t r, std::size_t node, double coeff) {
        const auto col = static_cast<Eigen::Index>(node);
        if (l >= 0) d(l, col) -= coeff / h;
        if (r < static_cast<std::ptrdiff_t>(n)) d(r, col) += coeff / h;
    };

    for (std::size_t i = 0; i <= n; ++i) {
        const auto l = static_cast<std::ptrdiff_t>(i) - 1;
        const auto r = static_cast<std::ptrdiff_t>(i);
        const double x_face = grid.x_min() + (static_cast<double>(i) - 0.5) * h;

        if (i == 0 || i == n) {
            // Boundary interface: nothing flows in from the zero exterior.
            const double f_face = drift(x_face, t);
            if (i == 0 && f_face < 0.0) add_flux(l, r, 0, f_face);
            if (i == n && f_face > 0.0) add_flux(l, r, n - 1, f_face);
            continue;
        }

        const auto li = static_cast<std::size_t>(l);
        const auto ri = static_cast<std::size_t>(r);
        bool central = scheme == DriftScheme::Central;
        if (scheme == DriftScheme::Hybrid) {
            central = std::max(std::abs(f[li]), std::abs(f[ri])) <= 2.0 * h * coupling;
        }
        if (central) {
            add_flux(l, r, li, 0.5 * f[li]);
            add_flux(l, r, ri, 0.5 * f[ri]);
        } else {
            const double f_face = drift(x_face, t);
            if (f_face > 0.0) {
                add_flux(l, r, li, f_face);
            } else if (f_face < 0.0) {
                add_flux(l, r, ri, f_face);
            }
        }
    }
    return std::make_shared<const Eigen::MatrixXd>(std::move(d));
}

double neighbour_coupling(const OperatorMatrix& op) {
    if (!op.has_nonlocal()) return 0.0;
    return op.nonlocal_part()(0, 1);
}

}  // namespace

OperatorMatrix assemble_drift_divergence(const Grid1D& grid, const DriftFn& drift, double t,
                                         DriftScheme scheme, double coupling) {
    OperatorMatrix::Metadata meta;
    meta.drift_time = t;
    meta.drift_name = drift.name;
    meta.scheme = scheme;
    return OperatorMatrix(grid, nullptr, nullptr, drift_matrix(grid, drift, t, scheme, coupling),
                          meta);
}

OperatorMatrix assemble_adjoint(const Grid1D& grid, const StableParams& params,
                                const DriftFn& drift, double t, DriftScheme scheme) {
    const OperatorMatrix nonlocal = assemble_nonlocal(grid, params);
    return nonlocal.with_drift(
        drift_matrix(grid, drift, t, scheme, neighbour_coupling(nonlocal)), t, drift.name, scheme);
}

OperatorMatrix reassemble_drift(const OperatorMatrix& op, const DriftFn& drift, double t) {
    const auto scheme = op.metadata().scheme;
    return op.with_drift(drift_matrix(op.grid(), drift, t, scheme, neighbour_coupling(op)), t,
                         drift.name, scheme);
}

Eigen::VectorXd apply_generator(const Grid1D& grid, const StableParams& params,
                                const DriftFn& drift, double t, const Eigen::VectorXd& phi,
                                DriftScheme scheme) {
    const OperatorMatrix adjoint = assemble_adjoint(grid, params, drift, t, scheme);
    return adjoint.matrix().transpose() * phi;
}

void write_operator_csv(std::ostream& out, const OperatorMatrix& op) {
    const auto& m = op.matrix();
    const auto old_precision = out.precision(17);
    out << "row,col,value\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (m(i, k) != 0.0) {
                out << i << ',' << k << ',' << m(i, k) << '\n';
            }
        }
    }
    out.precision(old_precision);
}

}  // namespace levyfilter
