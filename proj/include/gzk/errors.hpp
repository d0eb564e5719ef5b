#pragma once

#include <stdexcept>
#include <string>

namespace gzk {

/// Base class for all computation failures raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : Error {
    using Error::Error;
};

/// B outside (B0, 0) + (0, inf), or no bracketable root pair.
struct NoPeriodicOrbitError : Error {
    using Error::Error;
};

/// Orbit collapsed onto the center; the period integral is not defined.
struct DegenerateOrbitError : Error {
    using Error::Error;
};

struct QuadratureError : Error {
    using Error::Error;
};

/// Requested period is outside the range of the period map on the branch.
struct NoWaveForPeriodError : Error {
    using Error::Error;
};

/// Several energy levels produce the requested period; caller must choose.
struct AmbiguousPeriodError : Error {
    using Error::Error;
};

struct NewtonDivergenceError : Error {
    using Error::Error;
};

/// Profile (or its p-th power) is not resolved on the requested grid.
struct ResolutionError : Error {
    using Error::Error;
};

struct EigensolverError : Error {
    using Error::Error;
};

/// Kernel is not one-dimensional or the right-hand side is not solvable.
struct SolvabilityError : Error {
    using Error::Error;
};

struct NoSignChangeError : Error {
    using Error::Error;
};

/// f(0) >= 0: there is no transverse cutoff wavenumber to find.
struct NotApplicableError : Error {
    using Error::Error;
};

struct DegenerateKernelError : Error {
    using Error::Error;
};

/// Time step violates the stability bound of the integrating-factor scheme.
struct IntegratorStepError : Error {
    using Error::Error;
};

}  // namespace gzk
