#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

// Base class for everything this library throws on purpose.  Each
// subclass corresponds to one failure mode a caller might want to
// branch on; the what() string carries the specifics.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear solve hit a pivot below the singularity threshold.
struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& msg) : Error(msg) {}
};

// Symmetric eigensolver fed a matrix that is not symmetric.
struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& msg) : Error(msg) {}
};

// Square root of a negative product u_i*u_{i+1} requested.
struct NegativeProduct : Error {
    explicit NegativeProduct(const std::string& msg) : Error(msg) {}
};

// A rational expression was evaluated where a divisor vanishes.
struct EvaluationDomain : Error {
    explicit EvaluationDomain(const std::string& msg) : Error(msg) {}
};

// Input lies outside the image of the exponential coordinate map
// (wrong sign pattern, zero component, ...).
struct DomainViolation : Error {
    explicit DomainViolation(const std::string& msg) : Error(msg) {}
};

// Asked for a combination (index, size, ...) the library does not provide.
struct Unsupported : Error {
    explicit Unsupported(const std::string& msg) : Error(msg) {}
};

// A numerical computation produced NaN or Inf.  For integrations the
// last time at which the state was still finite is recorded.
struct NonFinite : Error {
    double last_valid_time = 0.0;
    explicit NonFinite(const std::string& msg, double t = 0.0)
        : Error(msg), last_valid_time(t) {}
};

// Shape mismatch in matrix/vector arithmetic.
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

} // namespace volterra
