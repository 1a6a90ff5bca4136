#include "levyfilter/functions.hpp"

#include <sstream>
#include <utility>

namespace levyfilter {

DriftFn double_well_drift() {
    return {"double_well", [](double x, double) { return 4.0 * (x - x * x * x); }, false};
}

SpaceTimeFunction polynomial_function(std::vector<double> coeffs) {
    std::ostringstream name;
    name << "polynomial[";
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        name << (k ? ";" : "") << coeffs[k];
    }
    name << "]";
    return {name.str(),
            [c = std::move(coeffs)](double x, double) {
                double acc = 0.0;
                for (auto it = c.rbegin(); it != c.rend(); ++it) {
                    acc = acc * x + *it;
                }
                return acc;
            },
            false};
}

SpaceTimeFunction constant_function(double c) {
    std::ostringstream name;
    name << "constant[" << c << "]";
    return {name.str(), [c](double, double) { return c; }, false};
}

SpaceTimeFunction zero_function() { return {"zero", [](double, double) { return 0.0; }, false}; }

ObservationFn identity_observation() {
    return {"identity", [](double x, double) { return x; }, false};
}

}  // namespace levyfilter
