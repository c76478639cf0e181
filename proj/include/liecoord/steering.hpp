#pragma once

// Steering control: fixed body-frame linear velocity e1, controlled angular
// velocity. C = (e1, R^3) on SE(3) and C = (e1, R) on SE(2).

#include <vector>

#include "liecoord/control_setting.hpp"
#include "liecoord/controllers.hpp"
#include "liecoord/graph.hpp"
#include "liecoord/se2.hpp"
#include "liecoord/se3.hpp"

namespace liecoord {

template <typename Scalar = double>
ControlSetting<SE3<Scalar>> se3_steering_setting() {
  ControlSetting<SE3<Scalar>> cs;
  cs.drift.setZero();
  cs.drift(0) = Scalar(1);
  cs.actuation = Eigen::Matrix<Scalar, 6, Eigen::Dynamic>::Zero(6, 3);
  cs.actuation.template bottomRows<3>().setIdentity();
  return cs;
}

template <typename Scalar = double>
ControlSetting<SE2<Scalar>> se2_steering_setting() {
  ControlSetting<SE2<Scalar>> cs;
  cs.drift = Vector3<Scalar>(1, 0, 0);
  cs.actuation = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>::Zero(3, 1);
  cs.actuation(2, 0) = Scalar(1);
  return cs;
}

/// u = eta_w + e1 x eta_v.
template <typename Scalar>
Vector3<Scalar> se3_steering_control(const Vector6<Scalar>& eta) {
  const Vector3<Scalar> e1 = Vector3<Scalar>::UnitX();
  return eta.template tail<3>() + e1.cross(Vector3<Scalar>(eta.template head<3>()));
}

/// Straight-line mode (eta_w = 0):
/// d eta_v,k/dt = sum_{j~>k} (Q_k^T Q_j eta_v,j - eta_v,k) - u_k x eta_v,k.
template <typename Scalar>
std::vector<Vector3<Scalar>> se3_steering_consensus_linear_rhs(
    const std::vector<SE3<Scalar>>& g, const std::vector<Vector3<Scalar>>& eta_v,
    const CommGraph& graph, double t, const std::vector<Vector3<Scalar>>& u) {
  detail::require_same_size(g, eta_v, "se3_steering_consensus_linear_rhs");
  detail::require_same_size(g, u, "se3_steering_consensus_linear_rhs");
  detail::require_graph_size(graph, g.size(), "se3_steering_consensus_linear_rhs");
  std::vector<Vector3<Scalar>> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    Vector3<Scalar> rate = Vector3<Scalar>::Zero();
    const Matrix3<Scalar> qkt = g[k].rotation().transpose();
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) {
      rate += qkt * g[j].rotation() * eta_v[j] - eta_v[k];
    }
    out[k] = rate - u[k].cross(eta_v[k]);
  }
  return out;
}

/// Helical-mode auxiliary triple; eta^l = (gamma + beta x alpha, alpha).
template <typename Scalar>
struct HelicalAux {
  Vector3<Scalar> alpha = Vector3<Scalar>::Zero();
  Vector3<Scalar> beta = Vector3<Scalar>::Zero();
  Vector3<Scalar> gamma = Vector3<Scalar>::Zero();

  Vector6<Scalar> eta() const {
    Vector6<Scalar> out;
    out << gamma + beta.cross(alpha), alpha;
    return out;
  }
};

/**
 * Helical-mode consensus:
 *   alpha' = sum (Q_k^T Q_j alpha_j - alpha_k) - u_k x alpha_k
 *   beta'  = sum (Q_k^T Q_j beta_j - beta_k + Q_k^T (r_j - r_k)) - u_k x beta_k - e1
 *   gamma' = sum (Q_k^T Q_j gamma_j - gamma_k) - u_k x gamma_k
 */
template <typename Scalar>
std::vector<HelicalAux<Scalar>> se3_steering_consensus_helical_rhs(
    const std::vector<SE3<Scalar>>& g, const std::vector<HelicalAux<Scalar>>& aux,
    const CommGraph& graph, double t, const std::vector<Vector3<Scalar>>& u) {
  detail::require_same_size(g, aux, "se3_steering_consensus_helical_rhs");
  detail::require_same_size(g, u, "se3_steering_consensus_helical_rhs");
  detail::require_graph_size(graph, g.size(), "se3_steering_consensus_helical_rhs");
  const Vector3<Scalar> e1 = Vector3<Scalar>::UnitX();
  std::vector<HelicalAux<Scalar>> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Matrix3<Scalar> qkt = g[k].rotation().transpose();
    HelicalAux<Scalar> rate;
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) {
      const Matrix3<Scalar> rel = qkt * g[j].rotation();
      rate.alpha += rel * aux[j].alpha - aux[k].alpha;
      rate.beta += rel * aux[j].beta - aux[k].beta + qkt * (g[j].translation() - g[k].translation());
      rate.gamma += rel * aux[j].gamma - aux[k].gamma;
    }
    rate.alpha -= u[k].cross(aux[k].alpha);
    rate.beta -= u[k].cross(aux[k].beta) + e1;
    rate.gamma -= u[k].cross(aux[k].gamma);
    out[k] = rate;
  }
  return out;
}

}  // namespace liecoord
