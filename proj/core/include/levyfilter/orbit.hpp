#pragma once

#include <string>
#include <vector>

#include "levyfilter/density.hpp"

namespace levyfilter {

inline constexpr const char* kTieRule =
    "ties resolved toward the node nearest the previous x_star; first snapshot takes the smallest x";

/// Per-snapshot maximizer of the density.
struct MostProbableOrbit {
    std::vector<double> times;
    std::vector<double> x_star;
    std::vector<double> peak_value;
    std::string tie_rule = kTieRule;
    bool refined = false;

    std::size_t size() const noexcept { return times.size(); }
};

struct OrbitOptions {
    /// Parabolic sub-grid refinement of the argmax (x_star then leaves the nodes).
    bool refine = false;
};

/// Argmax of every snapshot. ZeroDensityError for an empty evolution or an
/// all-zero snapshot.
MostProbableOrbit most_probable_orbit(const DensityEvolution& evo, const OrbitOptions& options = {});

/// Argmax of a single field under the same tie rule; `previous` is the prior
/// x_star (nullptr for the first snapshot).
std::size_t argmax_index(const DensityField& field, const double* previous);

/// Change of metastable well along a path.
struct TransitionEvent {
    double t_cross = 0.0;
    double from_well = 0.0;
    double to_well = 0.0;
    double dwell_before = 0.0;
};

/// Hysteresis labelling: the path commits to a well once it comes within
/// `deadband` of the well centre and keeps that label until it commits to a
/// different well. An event is emitted at each change of committed well, at the
/// first time inside the new well's deadband; dwell_before is measured from the
/// previous commit (or from the first sample for the first event).
///
/// With min_dwell > 0 a change is confirmed only if the path does not return
/// to the old well's deadband within min_dwell of entering the new one; a
/// candidate still open when the record ends is confirmed. min_dwell = 0 is
/// plain hysteresis.
std::vector<TransitionEvent> detect_transitions(const std::vector<double>& times,
                                                const std::vector<double>& values,
                                                const std::vector<double>& wells, double deadband,
                                                double min_dwell = 0.0);
std::vector<TransitionEvent> detect_transitions(const MostProbableOrbit& orbit,
                                                const std::vector<double>& wells, double deadband,
                                                double min_dwell = 0.0);

/// Fraction of samples with t >= burn_in where sign(a) == sign(b) (zero counts
/// as its own sign). Series must share their time axis.
double sign_agreement(const std::vector<double>& times, const std::vector<double>& a,
                      const std::vector<double>& b, double burn_in = 0.0);

/// Result of pairing two event lists in order.
struct EventMatch {
    std::size_t count_a = 0;
    std::size_t count_b = 0;
    bool counts_equal = false;
    /// |t_cross difference| per paired event (min(count_a, count_b) entries).
    std::vector<double> time_errors;
    double max_time_error = 0.0;
    /// Same wells in the same order, equal counts, every |dt| <= tolerance.
    bool matched = false;
};

EventMatch match_events(const std::vector<TransitionEvent>& a,
                        const std::vector<TransitionEvent>& b, double time_tolerance);

}  // namespace levyfilter
