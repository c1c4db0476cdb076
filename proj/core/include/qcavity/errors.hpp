#pragma once

#include <stdexcept>
#include <string>

namespace qcavity {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or malformed configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Integration breakdown: step-size underflow, non-finite right-hand side,
// or an exponent guard tripping. Carries the time of failure.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& msg, double t)
        : Error(msg + " (at t = " + std::to_string(t) + ")"), where(t) {}
    double where;
};

// Fock-space truncation breach in the exact solver.
class TruncationError : public Error {
public:
    TruncationError(double t, double tail, int nmax)
        : Error("Fock truncation breach: tail population " + std::to_string(tail)
                + " at t = " + std::to_string(t) + " with nmax = " + std::to_string(nmax)
                + "; increase nmax"),
          where(t), tail_mass(tail), nmax_used(nmax) {}
    double where;
    double tail_mass;
    int nmax_used;
};

// A nominally-real quantity carried an imaginary residual above tolerance,
// or a bounded quantity left its admissible range by more than round-off.
class NumericsError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace qcavity
