#pragma once

#include <stdexcept>
#include <string>

namespace levyfilter {

/// Parameter outside the mathematical domain of an operation (alpha outside
/// (0,2), y = 0 for the jump density, non-positive variances, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Explicit time stepping diverged or was asked to exceed its stability bound.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bayes denominator vanished: the observation has no support under the prior.
class DegenerateEvidenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An initial density whose support misses every grid node.
class EmptySupportError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two runs or fields live on different grids or time axes.
class AxisMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// All-zero snapshot handed to argmax extraction.
class ZeroDensityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace levyfilter
