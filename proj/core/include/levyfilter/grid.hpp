#pragma once

#include <cstddef>
#include <vector>

namespace levyfilter {

/// Uniform node set x_i = x_min + i dx, i = 0..n-1, on a truncated domain.
/// The density is taken to vanish outside [x_min, x_max].
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n);

    /// n = round((x_max - x_min) / dx) + 1; the spacing must divide the
    /// domain to within 1e-9 relative.
    static Grid1D from_spacing(double x_min, double x_max, double dx);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double dx() const noexcept { return dx_; }
    double width() const noexcept { return x_max_ - x_min_; }

    double node(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
    std::vector<double> nodes() const;

    /// Index of the node nearest to x (clamped to the grid).
    std::size_t nearest_index(double x) const noexcept;
    bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

/// Trapezoidal integral of nodal values over the grid.
double trapezoid(const Grid1D& grid, const std::vector<double>& values);

}  // namespace levyfilter
