#pragma once

#include <stdexcept>
#include <string>

namespace pme {

// Root of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes: configuration-like errors give 2, numerical
// failures give 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range scenario / grid configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Invalid parameter passed to a formula (alpha <= 1, M <= 0, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Radius outside the admissible range of a model manifold.
class DomainError : public Error {
public:
    using Error::Error;
};

// Time stepping failed (Newton divergence, positivity loss).
class SolverError : public Error {
public:
    using Error::Error;
};

// Quadrature or other numerical procedure did not reach its tolerance.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace pme
