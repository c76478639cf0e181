#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace liecoord {

/// Raised when an operation is called with arguments outside its contract
/// (mismatched sizes, invalid durations, malformed configuration).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation cannot produce a finite, meaningful result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerance for manifold-constraint checks (orthogonality, determinant).
inline constexpr double kManifoldTolerance = 1e-9;

/// Below this rotation angle the closed-form exponential switches to Taylor
/// expansions of its coefficients.
inline constexpr double kSmallAngle = 1e-6;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace liecoord
