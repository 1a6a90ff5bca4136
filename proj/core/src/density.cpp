#include "levyfilter/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyfilter/errors.hpp"

namespace levyfilter {

DensityField::DensityField(Grid1D grid, std::vector<double> values, bool normalized)
    : grid_(grid), values_(std::move(values)), normalized_(normalized) {
    if (values_.size() != grid_.size()) {
        throw AxisMismatchError("density has " + std::to_string(values_.size()) +
                                " values for a grid of " + std::to_string(grid_.size()) + " nodes");
    }
}

double DensityField::mass() const { return trapezoid(grid_, values_); }

double DensityField::normalize() {
    const double m = mass();
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw ZeroDensityError("cannot normalize a density with mass " + std::to_string(m));
    }
    for (auto& v : values_) {
        v /= m;
    }
    normalized_ = true;
    return m;
}

DensityField DensityField::normalized_copy() const {
    DensityField copy = *this;
    copy.normalize();
    return copy;
}

double DensityField::mean() const {
    std::vector<double> w(values_.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = grid_.node(i) * values_[i];
    }
    return trapezoid(grid_, w) / mass();
}

double DensityField::variance() const {
    const double mu = mean();
    std::vector<double> w(values_.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = grid_.node(i) - mu;
        w[i] = d * d * values_[i];
    }
    return trapezoid(grid_, w) / mass();
}

std::string describe(const InitSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GaussianInit>) {
                out << "gaussian(center=" << s.center << ";sigma=" << s.sigma << ")";
            } else if constexpr (std::is_same_v<T, UniformInit>) {
                out << "uniform(a=" << s.a << ";b=" << s.b << ")";
            } else {
                out << "point_mass(x0=" << s.x0 << ")";
            }
        },
        spec);
    return out.str();
}

DensityField init_density(const Grid1D& grid, const InitSpec& spec) {
    const std::size_t n = grid.size();
    const double h = grid.dx();
    std::vector<double> v(n, 0.0);

    if (const auto* g = std::get_if<GaussianInit>(&spec)) {
        if (!(g->sigma > 0.0)) {
            throw DomainError("gaussian initial density needs sigma > 0");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (grid.node(i) - g->center) / g->sigma;
            v[i] = std::exp(-0.5 * z * z);
        }
    } else if (const auto* u = std::get_if<UniformInit>(&spec)) {
        if (!(u->a < u->b)) {
            throw DomainError("uniform initial density needs a < b");
        }
        const double height = 1.0 / (u->b - u->a);
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = std::max(grid.node(i) - 0.5 * h, u->a);
            const double hi = std::min(grid.node(i) + 0.5 * h, u->b);
            v[i] = hi > lo ? height * (hi - lo) / h : 0.0;
        }
    } else {
        const auto& p = std::get<PointMassInit>(spec);
        if (!grid.contains(p.x0)) {
            throw EmptySupportError("point mass location lies outside the grid");
        }
        v[grid.nearest_index(p.x0)] = 1.0 / h;
        return DensityField(grid, std::move(v), true);
    }

    DensityField field(grid, std::move(v));
    const double m = field.mass();
    if (!(m > 0.0)) {
        throw EmptySupportError("initial density " + describe(spec) + " has no mass on the grid");
    }
    field.normalize();
    return field;
}

DensityEvolution::DensityEvolution(Grid1D grid, std::size_t store_stride)
    : grid_(grid), store_stride_(store_stride == 0 ? 1 : store_stride) {}

void DensityEvolution::push(double t, DensityField field, std::optional<double> log_norm) {
    if (!(field.grid() == grid_)) {
        throw AxisMismatchError("snapshot grid differs from the evolution grid");
    }
    if (!times_.empty() && !(t > times_.back())) {
        throw AxisMismatchError("snapshot times must be strictly increasing");
    }
    if (!times_.empty() && log_norm.has_value() != has_log_norm()) {
        throw AxisMismatchError("log normalization constants must be given for every snapshot");
    }
    times_.push_back(t);
    snapshots_.push_back(std::move(field));
    if (log_norm) {
        log_norm_.push_back(*log_norm);
    }
}

void DensityEvolution::add_update(UpdateRecord record) { updates_.push_back(std::move(record)); }

std::optional<std::size_t> DensityEvolution::find_time(double t, double tol) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
    if (it != times_.end() && std::abs(*it - t) <= tol) {
        return static_cast<std::size_t>(it - times_.begin());
    }
    return std::nullopt;
}

double l1_distance(const DensityField& p, const DensityField& q) {
    if (!(p.grid() == q.grid())) {
        throw AxisMismatchError("L1 distance needs densities on the same grid");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += std::abs(p[i] - q[i]);
    }
    return sum * p.grid().dx();
}

}  // namespace levyfilter
