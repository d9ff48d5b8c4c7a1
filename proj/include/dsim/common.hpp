#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dsim {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

template <typename Scalar>
using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrixX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RealVectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXc = ComplexVectorX<Real>;
using MatrixXc = ComplexMatrixX<Real>;
using VectorXr = RealVectorX<Real>;
using MatrixXr = RealMatrixX<Real>;

inline constexpr Real kPi = std::numbers::pi_v<Real>;

/// True when every coefficient is exactly zero. Eigen's isZero(0) compares squared
/// magnitudes, which underflow for entries below ~1e-154.
template <typename Derived>
bool exactly_zero(const Eigen::DenseBase<Derived>& v) {
  return (v.derived().array() == typename Derived::Scalar(0)).all();
}

/// Internal atomic levels that survive the interaction; |a> is only virtually populated.
enum class Level : int { b = 0, c = 1 };

inline constexpr int kLevels = 2;

inline constexpr int level_index(Level l) { return static_cast<int>(l); }

inline const char* level_name(Level l) { return l == Level::b ? "b" : "c"; }

// Error hierarchy. The CLI maps ConfigError to exit code 2 and NumericError
// (and subclasses) to exit code 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NumericRangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class GridError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ImpossibleOutcome : public NumericError {
 public:
  using NumericError::NumericError;
};

class ToleranceFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace dsim
