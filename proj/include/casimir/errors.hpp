#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two series whose offsets differ by a non-integer were combined additively.
class IncompatibleOffsetGrid : public Error {
 public:
  using Error::Error;
};

/// Series division by a series whose first stored coefficient is zero.
class ZeroLeadingCoefficient : public Error {
 public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation needs a rounding-free square root or a transcendental
/// constant that the exact-rational scalar cannot represent.
class InexactInExactMode : public Error {
 public:
  using Error::Error;
};

/// (1 - M0) or another system matrix is numerically singular.
class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& what, int block_m, double condition)
      : Error(what), m(block_m), condition_estimate(condition) {}
  int m;
  double condition_estimate;
};

/// Spectral radius of the round-trip matrix reached one (contact regime).
class SpectralRadiusError : public Error {
 public:
  SpectralRadiusError(const std::string& what, double radius)
      : Error(what), estimate(radius) {}
  double estimate;
};

/// Least-squares design matrix without full column rank.
class RankDeficientFit : public Error {
 public:
  using Error::Error;
};

/// Truncation sequence does not settle, so small-separation coefficients
/// cannot be extracted for this configuration.
class UnreliableExtraction : public Error {
 public:
  using Error::Error;
};

}  // namespace casimir
