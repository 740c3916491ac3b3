#pragma once

#include <stdexcept>
#include <string>

namespace semiflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the documented domain of an operation.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A precondition of a numerical procedure is not met (e.g. a non-regular weight).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A sampled value was NaN or infinite.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class IntegrationFailure : public Error {
public:
    using Error::Error;
};

/// A trajectory or map left the closed unit disk.
class InvalidSemiflow : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

/// A declared zero of a coboundary generator is not a fixed point of the flow.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

class SingularIntegrand : public Error {
public:
    using Error::Error;
};

class DegenerateOperator : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    ExtractionError(double t, const std::string& what)
        : Error("extraction failed at t = " + std::to_string(t) + ": " + what), t_(t) {}

    double time() const noexcept { return t_; }

private:
    double t_;
};

class Unsupported : public Error {
public:
    using Error::Error;
};

}  // namespace semiflow
