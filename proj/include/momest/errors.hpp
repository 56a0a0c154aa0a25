#ifndef MOMEST_ERRORS_HPP
#define MOMEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace momest {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A function evaluated to a non-finite value inside an integration range.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double abscissa)
        : Error(what + " (at x = " + std::to_string(abscissa) + ")"), abscissa_(abscissa) {}

    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// The sample cannot support the estimator (zero spread, negative denominator, ...).
/// The message names the violated condition.
class DegenerateSample : public Error {
public:
    using Error::Error;
};

/// The empirical moments fall outside the range the estimator can invert
/// (e.g. a Fisher sample mean at or below one).
class InfeasibleMoment : public Error {
public:
    using Error::Error;
};

/// A theoretical moment required by the computation does not exist for the law.
class MomentDomainError : public Error {
public:
    MomentDomainError(const std::string& what, int order) : Error(what), order_(order) {}

    int order() const noexcept { return order_; }

private:
    int order_;
};

/// The covariance matrix is too close to singular for a joint test.
class SingularCovariance : public Error {
public:
    using Error::Error;
};

class HarnessError : public Error {
public:
    using Error::Error;
};

}  // namespace momest

#endif  // MOMEST_ERRORS_HPP
