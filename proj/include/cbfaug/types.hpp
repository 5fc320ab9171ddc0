#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cbfaug {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimensions, non-finite entries, bad limits).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The plant does not admit the augmentation design (ill-defined relative
/// degree, singular control sensitivity).
class DesignError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The barrier rates violate the observer-speed rule, so no finite
/// invariance time exists.
class ParameterRuleError : public Error {
 public:
  using Error::Error;
};

/// A state or stage derivative became non-finite during integration.
class NumericalBlowUp : public Error {
 public:
  NumericalBlowUp(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + " s)"), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace cbfaug
