#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace lindqmc {

/// Raised when a linear-algebra step produces non-finite or singular data.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 1 + B was exactly singular; the configuration carries zero weight.
class SingularMatrixError : public NumericalError {
 public:
  explicit SingularMatrixError(const std::string& what)
      : NumericalError(what) {}
  double log_det() const { return -std::numeric_limits<double>::infinity(); }
};

/// Fast-updated Green's function drifted away from its stabilized rebuild.
class StabilizationError : public NumericalError {
 public:
  StabilizationError(const std::string& what, double drift, int slice)
      : NumericalError(what), drift_(drift), slice_(slice) {}
  double drift() const { return drift_; }
  int slice() const { return slice_; }

 private:
  double drift_;
  int slice_;
};

class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration. `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace lindqmc
