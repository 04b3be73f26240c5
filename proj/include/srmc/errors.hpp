#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace srmc {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Stationary law is not unique (no mixing: phi + psi is 0 or 2).
class DegenerateChain : public Error {
public:
    using Error::Error;
};

/// Closed-form 2x2 power is undefined for the identity matrix.
class IdentityMatrix : public Error {
public:
    using Error::Error;
};

class AmbiguousClassification : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

/// Asymptotic formulas need p * q > 0.
class ZeroPrefactor : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class IntegratorBlowUp : public Error {
public:
    IntegratorBlowUp(std::int64_t step, double value)
        : Error("Euler-Maruyama blow-up at step " + std::to_string(step) +
                " (|X| = " + std::to_string(value) + " > 10); reduce dt"),
          step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

}  // namespace srmc
