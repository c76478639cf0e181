#pragma once

#include <Eigen/Dense>
#include <array>
#include <random>
#include <string_view>

#include "liecoord/common.hpp"
#include "liecoord/so3.hpp"

namespace liecoord {

/**
 * Rigid motions SE(3), stored as (r, Q).
 *
 * Algebra coordinates: (v1, v2, v3, w1, w2, w3).
 *   g1 g2        = (r1 + Q1 r2, Q1 Q2)
 *   g^-1         = (-Q^T r, Q^T)
 *   Ad_g (v, w)  = (Q v + r x (Q w), Q w)
 *   [(v1,w1),(v2,w2)] = (w1 x v2 - w2 x v1, w1 x w2)
 */
template <typename Scalar_>
class SE3 {
 public:
  using Scalar = Scalar_;
  static constexpr int kDof = 6;
  static constexpr int kPayloadSize = 12;
  static constexpr std::string_view kName = "SE3";

  using Tangent = Vector6<Scalar>;
  using AdjointMatrix = Eigen::Matrix<Scalar, 6, 6>;
  using MatrixType = Eigen::Matrix<Scalar, 4, 4>;
  using Payload = Eigen::Matrix<Scalar, kPayloadSize, 1>;
  using Translation = Vector3<Scalar>;
  using Rotation = Matrix3<Scalar>;

  SE3() : translation_(Translation::Zero()), rotation_(Rotation::Identity()) {}
  SE3(const Translation& r, const Rotation& q) : translation_(r), rotation_(q) {}

  static SE3 identity() { return SE3(); }

  const Translation& translation() const { return translation_; }
  const Rotation& rotation() const { return rotation_; }

  SE3 operator*(const SE3& other) const {
    return SE3(translation_ + rotation_ * other.translation_, rotation_ * other.rotation_);
  }
  SE3 inverse() const {
    return SE3(-rotation_.transpose() * translation_, rotation_.transpose());
  }

  AdjointMatrix Ad() const {
    AdjointMatrix m = AdjointMatrix::Zero();
    m.template topLeftCorner<3, 3>() = rotation_;
    m.template topRightCorner<3, 3>() = hat(translation_) * rotation_;
    m.template bottomRightCorner<3, 3>() = rotation_;
    return m;
  }

  static AdjointMatrix ad(const Tangent& xi) {
    AdjointMatrix m = AdjointMatrix::Zero();
    const Matrix3<Scalar> w_hat = hat(xi.template tail<3>());
    m.template topLeftCorner<3, 3>() = w_hat;
    m.template topRightCorner<3, 3>() = hat(xi.template head<3>());
    m.template bottomRightCorner<3, 3>() = w_hat;
    return m;
  }

  static Tangent bracket(const Tangent& a, const Tangent& b) {
    const auto v1 = a.template head<3>();
    const auto w1 = a.template tail<3>();
    const auto v2 = b.template head<3>();
    const auto w2 = b.template tail<3>();
    Tangent out;
    out.template head<3>() = w1.cross(v2) - w2.cross(v1);
    out.template tail<3>() = w1.cross(w2);
    return out;
  }

  /// Screw-motion closed form: Q = exp(w^), r = V(w) v.
  static SE3 exp(const Tangent& xi) {
    const Vector3<Scalar> w = xi.template tail<3>();
    const Vector3<Scalar> v = xi.template head<3>();
    return SE3(detail::so3_left_jacobian<Scalar>(w) * v, detail::rodrigues<Scalar>(w));
  }

  MatrixType matrix() const {
    MatrixType m = MatrixType::Identity();
    m.template topLeftCorner<3, 3>() = rotation_;
    m.template topRightCorner<3, 1>() = translation_;
    return m;
  }

  Scalar manifold_error() const { return detail::rotation_error(rotation_); }
  SE3 reprojected() const { return SE3(translation_, detail::nearest_rotation(rotation_)); }

  Payload payload() const {
    Payload p;
    p.template head<3>() = translation_;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p(3 + 3 * i + j) = rotation_(i, j);
    return p;
  }
  template <typename Derived>
  static SE3 from_payload(const Eigen::MatrixBase<Derived>& p) {
    Rotation q;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q(i, j) = p(3 + 3 * i + j);
    return SE3(Translation(p(0), p(1), p(2)), q);
  }
  static constexpr std::array<std::string_view, kPayloadSize> payload_names() {
    return {"x", "y", "z", "q11", "q12", "q13", "q21", "q22", "q23", "q31", "q32", "q33"};
  }
  static constexpr std::array<std::string_view, kDof> tangent_names() {
    return {"v1", "v2", "v3", "w1", "w2", "w3"};
  }

  /// Position uniform in [-position_scale, position_scale]^3, uniform rotation.
  template <typename Rng>
  static SE3 random(Rng& rng, Scalar position_scale = Scalar(1)) {
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    Translation r;
    for (int i = 0; i < 3; ++i) r(i) = Scalar(box(rng));
    const Rotation q = detail::random_rotation<Scalar>(rng);
    return SE3(position_scale * r, q);
  }

 private:
  Translation translation_;
  Rotation rotation_;
};

using SE3d = SE3<double>;

}  // namespace liecoord
