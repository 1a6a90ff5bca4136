#include "levyfilter/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levyfilter/errors.hpp"

namespace levyfilter {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n), dx_(0.0) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw DomainError("grid requires finite x_min < x_max");
    }
    if (n < 5) {
        throw DomainError("grid requires at least 5 nodes, got " + std::to_string(n));
    }
    dx_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Grid1D Grid1D::from_spacing(double x_min, double x_max, double dx) {
    if (!(dx > 0.0)) {
        throw DomainError("grid spacing must be positive");
    }
    const double cells = (x_max - x_min) / dx;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded)) {
        throw DomainError("grid spacing " + std::to_string(dx) + " does not divide the domain");
    }
    return Grid1D(x_min, x_max, static_cast<std::size_t>(rounded) + 1);
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        x[i] = node(i);
    }
    return x;
}

std::size_t Grid1D::nearest_index(double x) const noexcept {
    const double s = std::round((x - x_min_) / dx_);
    if (s <= 0.0) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(s), n_ - 1);
}

double trapezoid(const Grid1D& grid, const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    if (!values.empty()) {
        sum -= 0.5 * (values.front() + values.back());
    }
    return sum * grid.dx();
}

}  // namespace levyfilter
