#ifndef OPTODIMER_ERRORS_HPP
#define OPTODIMER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace optodimer {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical input (negative rate, non-positive frequency, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Closed-form expression hit a vanishing denominator.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Fock-space truncation cannot represent the requested state.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Operator/state dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Ratio observable requested on a state with zero excitations.
class UndefinedObservableError : public Error {
public:
    using Error::Error;
};

/// Linear system for the steady state is singular.
class NoSteadyStateError : public Error {
public:
    using Error::Error;
};

/// Adaptive integrator gave up. Carries the time it reached.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double reached_time)
        : Error(what + " (reached t = " + std::to_string(reached_time) + ")"),
          reached_time_(reached_time) {}

    double reached_time() const noexcept { return reached_time_; }

private:
    double reached_time_;
};

/// Malformed or inconsistent scenario configuration. `line` is 1-based, 0 if not line-specific.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace optodimer

#endif
