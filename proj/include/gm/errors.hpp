#pragma once

#include <stdexcept>
#include <string>

namespace gm {

// Root of the library's exception hierarchy. The three direct subclasses map
// onto the CLI exit codes: ConfigError -> 2, DataError -> 3, NumericError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (bad hyperparameter, malformed config
// file, out-of-range option).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent data (malformed dataset file, degenerate geometry,
// broken graph invariants).
class DataError : public Error {
 public:
  using Error::Error;
};

// Numeric contract violations (non-finite values, shape mismatches, scores
// outside their domain).
class NumericError : public Error {
 public:
  using Error::Error;
};

// --- data errors ------------------------------------------------------------

// Fewer than three input points were given to the triangulation.
class TooFewPointsError : public DataError {
 public:
  using DataError::DataError;
};

// All triangulation input points lie on one line (or coincide).
class CollinearInputError : public DataError {
 public:
  using DataError::DataError;
};

// Two triangulation input points coincide exactly.
class DuplicatePointError : public DataError {
 public:
  using DataError::DataError;
};

// A matching pair has an empty ground-truth correspondence, so the
// intersection evaluation setting has nothing to restrict to.
class EmptyIntersectionError : public DataError {
 public:
  using DataError::DataError;
};

// A contrastive batch has no positive anchor at all.
class NoPositivesError : public DataError {
 public:
  using DataError::DataError;
};

// An augmentation produced a view with zero nodes (prevented by forced
// retention; kept as a defensive check).
class EmptyViewError : public DataError {
 public:
  using DataError::DataError;
};

// --- config errors ----------------------------------------------------------

// An augmentation spec violates its parameter constraints.
class InvalidSpecError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// --- numeric errors ---------------------------------------------------------

// Operand shapes are incompatible for a tape operation.
class ShapeError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A forward computation produced NaN or Inf.
class NonFiniteError : public NumericError {
 public:
  using NumericError::NumericError;
};

// backward() was called on a non-scalar node.
class NotScalarError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A recorded per-pair score lies outside [0, 1].
class ScoreOutOfRangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace gm
