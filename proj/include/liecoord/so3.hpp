#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>
#include <string_view>

#include "liecoord/common.hpp"

namespace liecoord {

/// Skew-symmetric matrix of w, so that hat(w) * x == w.cross(x).
template <typename Derived>
Matrix3<typename Derived::Scalar> hat(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  Matrix3<Scalar> s;
  s << Scalar(0), -w(2), w(1),  //
      w(2), Scalar(0), -w(0),   //
      -w(1), w(0), Scalar(0);
  return s;
}

/// Inverse of hat(). Throws UsageError when s is not skew-symmetric.
template <typename Derived>
Vector3<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if ((s + s.transpose()).norm() >= Scalar(kManifoldTolerance)) {
    throw UsageError("vee: matrix is not skew-symmetric");
  }
  return Vector3<Scalar>(s(2, 1), s(0, 2), s(1, 0));
}

namespace detail {

/// Rodrigues' formula with a Taylor fallback near zero angle.
template <typename Scalar>
Matrix3<Scalar> rodrigues(const Vector3<Scalar>& w) {
  using std::sin;
  using std::sqrt;
  const Scalar theta2 = w.squaredNorm();
  const Scalar theta = sqrt(theta2);
  Scalar a, b;  // sin(t)/t, (1 - cos(t))/t^2
  if (theta < Scalar(kSmallAngle)) {
    a = Scalar(1) - theta2 / Scalar(6);
    b = Scalar(0.5) - theta2 / Scalar(24);
  } else {
    a = sin(theta) / theta;
    b = Scalar(2) * sin(theta / 2) * sin(theta / 2) / theta2;
  }
  const Matrix3<Scalar> w_hat = hat(w);
  return Matrix3<Scalar>::Identity() + a * w_hat + b * w_hat * w_hat;
}

/// Left Jacobian of SO(3), V = I + (1-cos t)/t^2 W + (t - sin t)/t^3 W^2.
template <typename Scalar>
Matrix3<Scalar> so3_left_jacobian(const Vector3<Scalar>& w) {
  using std::sin;
  using std::sqrt;
  const Scalar theta2 = w.squaredNorm();
  const Scalar theta = sqrt(theta2);
  Scalar b, c;
  if (theta < Scalar(kSmallAngle)) {
    b = Scalar(0.5) - theta2 / Scalar(24);
    c = Scalar(1) / Scalar(6) - theta2 / Scalar(120);
  } else {
    b = Scalar(2) * sin(theta / 2) * sin(theta / 2) / theta2;
    c = (theta - sin(theta)) / (theta2 * theta);
  }
  const Matrix3<Scalar> w_hat = hat(w);
  return Matrix3<Scalar>::Identity() + b * w_hat + c * w_hat * w_hat;
}

/// Nearest rotation in the Frobenius sense (polar decomposition).
template <typename Scalar>
Matrix3<Scalar> nearest_rotation(const Matrix3<Scalar>& m) {
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > Scalar(1e-6) * sv(0))) {
    throw NumericError("reproject: rotation block is rank deficient");
  }
  Matrix3<Scalar> u = svd.matrixU();
  const Matrix3<Scalar> v = svd.matrixV();
  if ((u * v.transpose()).determinant() < Scalar(0)) u.col(2) *= Scalar(-1);
  return u * v.transpose();
}

template <typename Scalar>
Scalar rotation_error(const Matrix3<Scalar>& q) {
  using std::abs;
  return (q.transpose() * q - Matrix3<Scalar>::Identity()).norm() +
         abs(q.determinant() - Scalar(1));
}

/// Haar-uniform rotation via QR of a Gaussian matrix.
template <typename Scalar, typename Rng>
Matrix3<Scalar> random_rotation(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix3<Scalar> a;
  for (int i = 0; i < 9; ++i) a(i) = Scalar(normal(rng));
  Eigen::HouseholderQR<Matrix3<Scalar>> qr(a);
  Matrix3<Scalar> q = qr.householderQ();
  const Matrix3<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i) {
    if (r(i, i) < Scalar(0)) q.col(i) *= Scalar(-1);
  }
  if (q.determinant() < Scalar(0)) q.col(0) *= Scalar(-1);
  return q;
}

}  // namespace detail

/**
 * Rotation group SO(3), stored as a rotation matrix.
 *
 * Algebra coordinates: (w1, w2, w3), identified with so(3) through hat().
 * Ad_Q w = Q w and [w1, w2] = w1 x w2.
 */
template <typename Scalar_>
class SO3 {
 public:
  using Scalar = Scalar_;
  static constexpr int kDof = 3;
  static constexpr int kPayloadSize = 9;
  static constexpr std::string_view kName = "SO3";

  using Tangent = Vector3<Scalar>;
  using AdjointMatrix = Matrix3<Scalar>;
  using MatrixType = Matrix3<Scalar>;
  using Payload = Eigen::Matrix<Scalar, kPayloadSize, 1>;
  using Rotation = Matrix3<Scalar>;

  SO3() : rotation_(Rotation::Identity()) {}
  explicit SO3(const Rotation& q) : rotation_(q) {}

  static SO3 identity() { return SO3(); }

  const Rotation& rotation() const { return rotation_; }

  SO3 operator*(const SO3& other) const { return SO3(rotation_ * other.rotation_); }
  SO3 inverse() const { return SO3(rotation_.transpose()); }

  AdjointMatrix Ad() const { return rotation_; }
  static AdjointMatrix ad(const Tangent& w) { return hat(w); }
  static Tangent bracket(const Tangent& a, const Tangent& b) { return a.cross(b); }

  static SO3 exp(const Tangent& w) { return SO3(detail::rodrigues<Scalar>(w)); }

  MatrixType matrix() const { return rotation_; }

  Scalar manifold_error() const { return detail::rotation_error(rotation_); }
  SO3 reprojected() const { return SO3(detail::nearest_rotation(rotation_)); }

  Payload payload() const {
    Payload p;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p(3 * i + j) = rotation_(i, j);
    return p;
  }
  template <typename Derived>
  static SO3 from_payload(const Eigen::MatrixBase<Derived>& p) {
    Rotation q;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q(i, j) = p(3 * i + j);
    return SO3(q);
  }
  static constexpr std::array<std::string_view, kPayloadSize> payload_names() {
    return {"q11", "q12", "q13", "q21", "q22", "q23", "q31", "q32", "q33"};
  }
  static constexpr std::array<std::string_view, kDof> tangent_names() {
    return {"w1", "w2", "w3"};
  }

  /// Uniform random rotation; position_scale is unused for SO(3).
  template <typename Rng>
  static SO3 random(Rng& rng, Scalar /*position_scale*/ = Scalar(1)) {
    return SO3(detail::random_rotation<Scalar>(rng));
  }

 private:
  Rotation rotation_;
};

using SO3d = SO3<double>;

}  // namespace liecoord
