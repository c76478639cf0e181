#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "liecoord/common.hpp"
#include "liecoord/lie.hpp"

namespace liecoord {

/**
 * Affine actuation xi^l = a + B u with orthonormal columns in B.
 *
 * The feasible set C = {a + B u} is affine, so the Euclidean projection onto
 * it is Pi_C(eta) = a + B B^T (eta - a).
 */
template <LieGroup G>
struct ControlSetting {
  using Scalar = typename G::Scalar;
  using Tangent = typename G::Tangent;
  using Actuation = Eigen::Matrix<Scalar, G::kDof, Eigen::Dynamic>;

  Tangent drift = Tangent::Zero();
  Actuation actuation = Actuation::Identity(G::kDof, G::kDof);

  static ControlSetting fully_actuated() { return ControlSetting{}; }

  /// Throws UsageError unless B^T B = I within 1e-12 and a is finite.
  static ControlSetting make(const Tangent& drift, const Actuation& actuation) {
    ControlSetting cs{drift, actuation};
    cs.validate();
    return cs;
  }

  int controls() const { return static_cast<int>(actuation.cols()); }
  bool is_fully_actuated() const { return controls() == G::kDof; }

  void validate() const {
    if (actuation.cols() < 1 || actuation.cols() > G::kDof) {
      throw UsageError("control setting: actuation must have between 1 and n columns");
    }
    const MatrixX<Scalar> gram = actuation.transpose() * actuation;
    if ((gram - MatrixX<Scalar>::Identity(controls(), controls())).norm() > Scalar(1e-12)) {
      throw UsageError("control setting: actuation columns must be orthonormal");
    }
    if (!drift.allFinite()) throw UsageError("control setting: drift must be finite");
  }

  Tangent project(const Tangent& eta) const {
    return drift + actuation * (actuation.transpose() * (eta - drift));
  }

  /// Distance from eta to C.
  Scalar distance(const Tangent& eta) const { return (eta - project(eta)).norm(); }
  bool contains(const Tangent& eta, Scalar tol) const { return distance(eta) <= tol; }

  Tangent velocity(const VectorX<Scalar>& u) const { return drift + actuation * u; }
};

template <LieGroup G>
typename G::Tangent project_to_C(const typename G::Tangent& eta, const ControlSetting<G>& cs) {
  return cs.project(eta);
}

}  // namespace liecoord
