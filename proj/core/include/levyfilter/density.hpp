#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levyfilter/grid.hpp"

namespace levyfilter {

/// Nodal density values on a Grid1D at one time instant.
class DensityField {
public:
    DensityField(Grid1D grid, std::vector<double> values, bool normalized = false);

    const Grid1D& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    bool normalized() const noexcept { return normalized_; }
    void set_normalized(bool v) noexcept { normalized_ = v; }

    /// Trapezoidal mass.
    double mass() const;
    /// Divides by the mass; returns the divisor. Throws ZeroDensityError on zero mass.
    double normalize();
    DensityField normalized_copy() const;

    double mean() const;
    double variance() const;

private:
    Grid1D grid_;
    std::vector<double> values_;
    bool normalized_;
};

struct GaussianInit {
    double center = -1.0;
    double sigma = 0.1;
};

/// Uniform law on (a, b); each node receives the exact average of the law
/// over its cell [x - dx/2, x + dx/2].
struct UniformInit {
    double a = -1.25;
    double b = -0.75;
};

/// Mass 1 on the node nearest x0 (value 1/dx).
struct PointMassInit {
    double x0 = 0.0;
};

using InitSpec = std::variant<GaussianInit, UniformInit, PointMassInit>;

std::string describe(const InitSpec& spec);

/// Normalized initial density. EmptySupportError when the law misses the grid.
DensityField init_density(const Grid1D& grid, const InitSpec& spec);

/// Pre-update density kept by the continuous-discrete filter at an observation.
struct UpdateRecord {
    double time = 0.0;
    DensityField prior;
    /// log of int p(y|x) p(x) dx.
    double log_evidence = 0.0;
    /// Index of the matching posterior snapshot in the evolution.
    std::size_t snapshot_index = 0;
};

/// Time-indexed snapshots of a density on one grid. Times are strictly increasing.
class DensityEvolution {
public:
    DensityEvolution(Grid1D grid, std::size_t store_stride);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t store_stride() const noexcept { return store_stride_; }

    /// Appends a snapshot; AxisMismatchError for a different grid or a
    /// non-increasing time.
    void push(double t, DensityField field, std::optional<double> log_norm = std::nullopt);
    void add_update(UpdateRecord record);

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<DensityField>& snapshots() const noexcept { return snapshots_; }
    const DensityField& snapshot(std::size_t i) const { return snapshots_.at(i); }
    const DensityField& back() const { return snapshots_.back(); }

    /// Log normalization constants, one per snapshot, when the producer logs them.
    bool has_log_norm() const noexcept { return !log_norm_.empty(); }
    const std::vector<double>& log_norm() const noexcept { return log_norm_; }

    const std::vector<UpdateRecord>& updates() const noexcept { return updates_; }

    /// Index of the snapshot whose time is within tol of t.
    std::optional<std::size_t> find_time(double t, double tol = 1e-9) const;

private:
    Grid1D grid_;
    std::size_t store_stride_;
    std::vector<double> times_;
    std::vector<DensityField> snapshots_;
    std::vector<double> log_norm_;
    std::vector<UpdateRecord> updates_;
};

/// sum_i |p_i - q_i| dx over a common grid.
double l1_distance(const DensityField& p, const DensityField& q);

}  // namespace levyfilter
