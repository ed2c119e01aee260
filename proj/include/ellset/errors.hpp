#pragma once

#include <stdexcept>
#include <string>

namespace ellset {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// |delta|*|X| >= 1: the shift I - delta*X is singular or indefinite.
struct SingularShift : Error {
  using Error::Error;
};

struct PointOutsideDomain : Error {
  using Error::Error;
};

/// No membership sign change found along the ray X + tI within the
/// search horizon; the level set is empty or all of S(n) along the ray.
struct NoBracket : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ZeroCoefficient : Error {
  using Error::Error;
};

struct InvalidCount : Error {
  using Error::Error;
};

struct InvalidRadius : Error {
  using Error::Error;
};

struct NoAcceptedSamples : Error {
  using Error::Error;
};

struct BallOutsideDomain : Error {
  using Error::Error;
};

struct OnAxis : Error {
  using Error::Error;
};

struct NoTouchingFound : Error {
  using Error::Error;
};

struct NoPositiveMax : Error {
  using Error::Error;
};

struct BoundaryViolation : Error {
  using Error::Error;
};

struct PreconditionNotMet : Error {
  using Error::Error;
};

/// Bad command-line or run configuration (maps to exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

/// Internal defect (e.g. an iteration cap that must never be hit).
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace ellset
