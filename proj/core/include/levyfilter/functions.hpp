#pragma once

#include <functional>
#include <string>
#include <vector>

namespace levyfilter {

/// Named scalar field g(x, t). Used for the drift f and the observation map h.
struct SpaceTimeFunction {
    std::string name;
    std::function<double(double, double)> eval;
    bool time_dependent = false;

    double operator()(double x, double t) const { return eval(x, t); }
};

using DriftFn = SpaceTimeFunction;
using ObservationFn = SpaceTimeFunction;

/// f(x) = 4 (x - x^3): wells at -1 and +1, barrier at 0.
DriftFn double_well_drift();
/// sum_k coeffs[k] x^k.
SpaceTimeFunction polynomial_function(std::vector<double> coeffs);
SpaceTimeFunction constant_function(double c);
SpaceTimeFunction zero_function();
/// h(x, t) = x.
ObservationFn identity_observation();

}  // namespace levyfilter
