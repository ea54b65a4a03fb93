#pragma once

#include <stdexcept>
#include <string>

namespace semilab {

/// Base class for all semilab failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector data inconsistent with its ambient space (wrong sample count,
/// missing representation, spaces that do not match).
class MalformedVectorError : public Error {
public:
    using Error::Error;
};

/// Operation requested on a subspace dimension the sampler does not support.
class UnsupportedDimensionError : public Error {
public:
    using Error::Error;
};

/// Minimax descent did not converge; carries the best value found so far.
class SolverFailureError : public Error {
public:
    SolverFailureError(const std::string& what, double best)
        : Error(what), best_value(best) {}
    double best_value;
};

/// Adaptive or composite quadrature failed to reach the requested tolerance.
class QuadratureFailureError : public Error {
public:
    using Error::Error;
};

/// Negative time, or fractional time handed to a discrete semigroup.
class TimeDomainError : public Error {
public:
    using Error::Error;
};

/// An evolved basis lost linear independence at some time T.
class DegenerateBasisError : public Error {
public:
    DegenerateBasisError(const std::string& what, double at_time)
        : Error(what), time(at_time) {}
    double time;
};

/// A diagnostic needs structure (e.g. a closed-form X0 distance) the
/// scenario does not provide.
class UnsupportedScenarioError : public Error {
public:
    using Error::Error;
};

} // namespace semilab
