#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string_view>

#include "liecoord/common.hpp"

namespace liecoord {

namespace detail {

template <typename Scalar>
Matrix2<Scalar> planar_rotation(Scalar theta) {
  using std::cos;
  using std::sin;
  Matrix2<Scalar> q;
  q << cos(theta), -sin(theta), sin(theta), cos(theta);
  return q;
}

/// Quarter-turn rotation Q_{pi/2}.
template <typename Scalar>
Matrix2<Scalar> quarter_turn() {
  Matrix2<Scalar> j;
  j << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);
  return j;
}

/// Wraps an angle to (-pi, pi]; -pi maps to pi.
template <typename Scalar>
Scalar wrap_angle(Scalar theta) {
  using std::remainder;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar w = remainder(theta, two_pi);
  if (w <= -std::numbers::pi_v<Scalar>) w += two_pi;
  return w;
}

}  // namespace detail

/**
 * Planar rigid motions SE(2), stored as (r, theta) with theta in (-pi, pi].
 *
 * Algebra coordinates: (v1, v2, w).
 *   g1 g2         = (r1 + Q(theta1) r2, theta1 + theta2)
 *   Ad_g (v, w)   = (Q(theta) v - w J r, w)            J = Q(pi/2)
 *   [(v1,w1),(v2,w2)] = (w1 J v2 - w2 J v1, 0)
 */
template <typename Scalar_>
class SE2 {
 public:
  using Scalar = Scalar_;
  static constexpr int kDof = 3;
  static constexpr int kPayloadSize = 3;
  static constexpr std::string_view kName = "SE2";

  using Tangent = Vector3<Scalar>;
  using AdjointMatrix = Matrix3<Scalar>;
  using MatrixType = Matrix3<Scalar>;
  using Payload = Vector3<Scalar>;
  using Translation = Vector2<Scalar>;

  SE2() : translation_(Translation::Zero()), angle_(0) {}
  SE2(const Translation& r, Scalar theta) : translation_(r), angle_(detail::wrap_angle(theta)) {}

  static SE2 identity() { return SE2(); }

  const Translation& translation() const { return translation_; }
  Scalar angle() const { return angle_; }
  Matrix2<Scalar> rotation() const { return detail::planar_rotation(angle_); }

  SE2 operator*(const SE2& other) const {
    return SE2(translation_ + rotation() * other.translation_, angle_ + other.angle_);
  }
  SE2 inverse() const { return SE2(-detail::planar_rotation(-angle_) * translation_, -angle_); }

  AdjointMatrix Ad() const {
    AdjointMatrix m = AdjointMatrix::Zero();
    m.template topLeftCorner<2, 2>() = rotation();
    m.template topRightCorner<2, 1>() = -detail::quarter_turn<Scalar>() * translation_;
    m(2, 2) = Scalar(1);
    return m;
  }

  static AdjointMatrix ad(const Tangent& xi) {
    const Matrix2<Scalar> j = detail::quarter_turn<Scalar>();
    AdjointMatrix m = AdjointMatrix::Zero();
    m.template topLeftCorner<2, 2>() = xi(2) * j;
    m.template topRightCorner<2, 1>() = -j * xi.template head<2>();
    return m;
  }

  static Tangent bracket(const Tangent& a, const Tangent& b) {
    const Matrix2<Scalar> j = detail::quarter_turn<Scalar>();
    Tangent out;
    out.template head<2>() = a(2) * (j * b.template head<2>()) - b(2) * (j * a.template head<2>());
    out(2) = Scalar(0);
    return out;
  }

  static SE2 exp(const Tangent& xi) {
    using std::sin;
    const Scalar w = xi(2);
    Scalar s, c;  // sin(w)/w, (1 - cos(w))/w
    if (std::abs(w) < Scalar(kSmallAngle)) {
      s = Scalar(1) - w * w / Scalar(6);
      c = w / Scalar(2) - w * w * w / Scalar(24);
    } else {
      s = sin(w) / w;
      c = Scalar(2) * sin(w / 2) * sin(w / 2) / w;
    }
    Matrix2<Scalar> v;
    v << s, -c, c, s;
    return SE2(v * xi.template head<2>(), w);
  }

  /// Homogeneous 3x3 representation.
  MatrixType matrix() const {
    MatrixType m = MatrixType::Identity();
    m.template topLeftCorner<2, 2>() = rotation();
    m.template topRightCorner<2, 1>() = translation_;
    return m;
  }

  Scalar manifold_error() const {
    return std::isfinite(static_cast<double>(angle_)) && translation_.allFinite()
               ? Scalar(0)
               : Scalar(INFINITY);
  }
  SE2 reprojected() const { return SE2(translation_, angle_); }

  Payload payload() const { return Payload(translation_(0), translation_(1), angle_); }
  template <typename Derived>
  static SE2 from_payload(const Eigen::MatrixBase<Derived>& p) {
    return SE2(Translation(p(0), p(1)), p(2));
  }
  static constexpr std::array<std::string_view, kPayloadSize> payload_names() {
    return {"x", "y", "theta"};
  }
  static constexpr std::array<std::string_view, kDof> tangent_names() { return {"v1", "v2", "w"}; }

  /// Position uniform in [-position_scale, position_scale]^2, heading uniform.
  template <typename Rng>
  static SE2 random(Rng& rng, Scalar position_scale = Scalar(1)) {
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    std::uniform_real_distribution<double> heading(-std::numbers::pi, std::numbers::pi);
    Translation r;
    for (int i = 0; i < 2; ++i) r(i) = Scalar(box(rng));
    const Scalar theta = Scalar(heading(rng));
    return SE2(position_scale * r, theta);
  }

 private:
  Translation translation_;
  Scalar angle_;
};

using SE2d = SE2<double>;

}  // namespace liecoord
