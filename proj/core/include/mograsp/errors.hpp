#pragma once

#include <stdexcept>
#include <string>

namespace mograsp {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Geometric input that violates a precondition (collinear hull input,
/// degenerate polygon, coincident contact positions, ...).
class DegenerateInput : public Error {
public:
  explicit DegenerateInput(const std::string& what) : Error(what) {}
};

/// No contact pair of the sampled set passes the equilibrium test.
class NoStableGrasp : public Error {
public:
  explicit NoStableGrasp(const std::string& what) : Error(what) {}
};

/// Scene generation could not place an object within the attempt budget.
class PlacementFailure : public Error {
public:
  explicit PlacementFailure(const std::string& what) : Error(what) {}
};

/// Feature encoding rejected an object (too many vertices).
class EncodingError : public Error {
public:
  explicit EncodingError(const std::string& what) : Error(what) {}
};

/// Training dataset has too few positives for a class.
class DegenerateDataset : public Error {
public:
  explicit DegenerateDataset(const std::string& what) : Error(what) {}
};

/// Bad configuration value or unknown key.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// File schema mismatch or malformed persisted artifact.
class SchemaError : public Error {
public:
  explicit SchemaError(const std::string& what) : Error(what) {}
};

}  // namespace mograsp
