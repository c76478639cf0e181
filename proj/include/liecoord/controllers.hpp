#pragma once

// Right-hand sides of the coordination control laws. Every function is pure:
// it maps the swarm state (positions g_k, auxiliary velocities) and the
// communication graph to the body velocities xi_k^l and auxiliary rates.
// Neighbor sums run over in-neighbors in increasing id order.

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <vector>

#include "liecoord/common.hpp"
#include "liecoord/control_setting.hpp"
#include "liecoord/graph.hpp"
#include "liecoord/lie.hpp"

namespace liecoord {

template <LieGroup G>
using TangentVector = std::vector<typename G::Tangent>;

template <LieGroup G>
struct CascadeRates {
  TangentVector<G> velocity;  // xi_k^l
  TangentVector<G> aux_rate;  // d eta_k^l / dt
};

namespace detail {

template <typename A, typename B>
void require_same_size(const A& a, const B& b, const char* what) {
  if (a.size() != b.size()) throw UsageError(std::string(what) + ": per-agent arrays differ in length");
}

inline void require_graph_size(const CommGraph& graph, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(graph.size()) != n) {
    throw UsageError(std::string(what) + ": graph size does not match agent count");
  }
}

}  // namespace detail

/// Vector-space consensus d xi_k/dt = sum_{j~>k} (xi_j - xi_k).
template <typename Vec>
std::vector<Vec> ric_consensus_rhs(const std::vector<Vec>& xi, const CommGraph& graph, double t) {
  detail::require_graph_size(graph, xi.size(), "ric_consensus_rhs");
  std::vector<Vec> out(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) {
    out[k] = Vec::Zero(xi[k].size());
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) out[k] += xi[j] - xi[k];
  }
  return out;
}

/// Consensus on right velocities written in left coordinates:
/// d xi_k^l/dt = sum_{j~>k} (Ad_{g_k^-1 g_j} xi_j^l - xi_k^l).
template <LieGroup G>
TangentVector<G> lic_consensus_rhs(const std::vector<G>& g, const TangentVector<G>& xi,
                                   const CommGraph& graph, double t) {
  detail::require_same_size(g, xi, "lic_consensus_rhs");
  detail::require_graph_size(graph, g.size(), "lic_consensus_rhs");
  TangentVector<G> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    out[k].setZero();
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) {
      out[k] += adjoint(left_relative(g[k], g[j]), xi[j]) - xi[k];
    }
  }
  return out;
}

/**
 * Total coordination with consensus on right velocities.
 *
 *   xi_k   = eta_k + q_k,   q_k = -<eta_k, sum_{j~>k} (eta_k - eta_j)>
 *   eta_k' = sum_{j~>k} (Ad_{lambda_jk} eta_j - eta_k) - [xi_k, eta_k]
 *
 * Intended for fully actuated agents on a fixed undirected graph.
 */
template <LieGroup G>
CascadeRates<G> tc_right_cascade_rhs(const std::vector<G>& g, const TangentVector<G>& eta,
                                     const CommGraph& graph, double t) {
  detail::require_same_size(g, eta, "tc_right_cascade_rhs");
  detail::require_graph_size(graph, g.size(), "tc_right_cascade_rhs");
  const std::size_t n = g.size();
  CascadeRates<G> out{TangentVector<G>(n), TangentVector<G>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    typename G::Tangent disagreement = G::Tangent::Zero();
    typename G::Tangent consensus = G::Tangent::Zero();
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) {
      disagreement += eta[k] - eta[j];
      consensus += adjoint(left_relative(g[k], g[j]), eta[j]) - eta[k];
    }
    const typename G::Tangent q = -pairing<G>(eta[k], disagreement);
    out.velocity[k] = eta[k] + q;
    out.aux_rate[k] = consensus - G::bracket(out.velocity[k], eta[k]);
  }
  return out;
}

/**
 * Total coordination with consensus on left velocities (bi-invariant metric
 * groups).
 *
 *   eta_k' = sum_{j~>k} (eta_j - eta_k)
 *   q_k    = <eta_k, sum_{j~>k} (eta_k - Ad_{lambda_jk} eta_j)>
 *   xi_k   = eta_k + B B^T q_k
 *
 * With full actuation B B^T = I. Underactuated settings require every
 * eta_k to lie in C; a UsageError is thrown otherwise.
 */
template <LieGroup G>
CascadeRates<G> tc_left_cascade_rhs(const std::vector<G>& g, const TangentVector<G>& eta,
                                    const CommGraph& graph, double t,
                                    const ControlSetting<G>& cs = ControlSetting<G>::fully_actuated()) {
  detail::require_same_size(g, eta, "tc_left_cascade_rhs");
  detail::require_graph_size(graph, g.size(), "tc_left_cascade_rhs");
  const std::size_t n = g.size();
  const bool underactuated = !cs.is_fully_actuated();
  CascadeRates<G> out{TangentVector<G>(n), TangentVector<G>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    if (underactuated && !cs.contains(eta[k], typename G::Scalar(1e-8) * (1 + eta[k].norm()))) {
      throw UsageError("tc_left_cascade_rhs: auxiliary velocity of agent " + std::to_string(k) +
                       " is not in the feasible set C");
    }
    typename G::Tangent mismatch = G::Tangent::Zero();
    typename G::Tangent consensus = G::Tangent::Zero();
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) {
      mismatch += eta[k] - adjoint(left_relative(g[k], g[j]), eta[j]);
      consensus += eta[j] - eta[k];
    }
    typename G::Tangent q = pairing<G>(eta[k], mismatch);
    if (underactuated) q = cs.actuation * (cs.actuation.transpose() * q);
    out.velocity[k] = eta[k] + q;
    out.aux_rate[k] = consensus;
  }
  return out;
}

/// d eta_k/dt = [eta_k, [eta_k, sum_j (eta_k - eta_j)]] over the given neighbor values.
template <LieGroup G>
typename G::Tangent double_bracket_rhs(const typename G::Tangent& eta_k,
                                       const TangentVector<G>& neighbors) {
  typename G::Tangent disagreement = G::Tangent::Zero();
  for (const auto& eta_j : neighbors) disagreement += eta_k - eta_j;
  return G::bracket(eta_k, G::bracket(eta_k, disagreement));
}

/**
 * Linear representer f(eta) of q -> (eta - Pi_C(eta)) . [eta, B q],
 * assembled column by column: f_i = (eta - Pi_C(eta)) . [eta, b_i].
 */
template <LieGroup G>
VectorX<typename G::Scalar> underactuated_feedback(const typename G::Tangent& eta,
                                                   const ControlSetting<G>& cs) {
  const typename G::Tangent residual = eta - cs.project(eta);
  VectorX<typename G::Scalar> f(cs.controls());
  for (int i = 0; i < cs.controls(); ++i) {
    const typename G::Tangent b = cs.actuation.col(i);
    f(i) = residual.dot(G::bracket(eta, b));
  }
  return f;
}

/// (eta - Pi_C(eta)) . [eta, Pi_C(eta)]; the convergence argument needs it <= 0.
template <LieGroup G>
typename G::Scalar sign_condition(const typename G::Tangent& eta, const ControlSetting<G>& cs) {
  const typename G::Tangent p = cs.project(eta);
  return (eta - p).dot(G::bracket(eta, p));
}

/// Per-agent cost V_k = 1/2 |eta - Pi_C(eta)|^2.
template <LieGroup G>
typename G::Scalar feasibility_cost(const typename G::Tangent& eta, const ControlSetting<G>& cs) {
  return typename G::Scalar(0.5) * (eta - cs.project(eta)).squaredNorm();
}

template <LieGroup G>
struct UnderactuatedRates {
  TangentVector<G> velocity;
  TangentVector<G> aux_rate;
  std::vector<typename G::Scalar> sign_condition;  // per agent, see sign_condition()
};

/**
 * Underactuated left-invariant coordination.
 *
 *   xi_k   = Pi_C(eta_k) + B q_k,  q_k = -f(eta_k)
 *   eta_k' = sum_{j~>k} (Ad_{lambda_jk} eta_j - eta_k) - [xi_k, eta_k]
 *
 * xi_k always lies in C. The per-agent sign condition is returned so callers
 * can flag states where the descent argument does not apply.
 */
template <LieGroup G>
UnderactuatedRates<G> underactuated_lic_rhs(const std::vector<G>& g, const TangentVector<G>& eta,
                                            const CommGraph& graph, double t,
                                            const ControlSetting<G>& cs) {
  detail::require_same_size(g, eta, "underactuated_lic_rhs");
  detail::require_graph_size(graph, g.size(), "underactuated_lic_rhs");
  const std::size_t n = g.size();
  UnderactuatedRates<G> out{TangentVector<G>(n), TangentVector<G>(n),
                            std::vector<typename G::Scalar>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const typename G::Tangent projected = cs.project(eta[k]);
    const VectorX<typename G::Scalar> u = cs.actuation.transpose() * (projected - cs.drift) -
                                          underactuated_feedback<G>(eta[k], cs);
    out.velocity[k] = cs.velocity(u);
    typename G::Tangent consensus = G::Tangent::Zero();
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) {
      consensus += adjoint(left_relative(g[k], g[j]), eta[j]) - eta[k];
    }
    out.aux_rate[k] = consensus - G::bracket(out.velocity[k], eta[k]);
    out.sign_condition[k] = sign_condition<G>(eta[k], cs);
  }
  return out;
}

enum class SignVerdict { kEquality, kHolds, kViolated };

template <LieGroup G>
struct Theorem3Check {
  SignVerdict verdict = SignVerdict::kEquality;
  typename G::Scalar max_value = 0;  // largest sampled sign-condition value
  std::optional<typename G::Tangent> witness;
};

/**
 * Monte-Carlo classification of the sign condition over the orbit sweep
 * O_C = {Ad_g xi : xi in C}. Values within 1e-9 (1 + |eta|)^3 of zero count
 * as zero.
 */
template <LieGroup G>
Theorem3Check<G> check_theorem3_assumption(const ControlSetting<G>& cs, int samples,
                                           std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Theorem3Check<G> result;
  bool all_zero = true;
  double worst = -INFINITY;
  for (int s = 0; s < samples; ++s) {
    const G g = G::random(rng, typename G::Scalar(2));
    VectorX<typename G::Scalar> u(cs.controls());
    for (int i = 0; i < cs.controls(); ++i) u(i) = normal(rng);
    const typename G::Tangent eta = adjoint(g, cs.velocity(u));
    const double value = static_cast<double>(sign_condition<G>(eta, cs));
    const double scale = 1.0 + static_cast<double>(eta.norm());
    const double tol = 1e-9 * scale * scale * scale;
    if (std::abs(value) > tol) all_zero = false;
    if (value > worst) {
      worst = value;
      if (value > tol) result.witness = eta;
    }
  }
  result.max_value = typename G::Scalar(worst);
  if (result.witness) {
    result.verdict = SignVerdict::kViolated;
  } else {
    result.verdict = all_zero ? SignVerdict::kEquality : SignVerdict::kHolds;
  }
  return result;
}

enum class CompatibilityMode { kLic, kTc };

struct PairCompatibility {
  int j;
  int k;
  bool compatible;
  double residual;
};

/**
 * Equilibrium compatibility of the current positions with the actuation.
 *
 * For every pair j < k with lambda = g_k^-1 g_j:
 *   LIC: exists u_j, u_k with Ad_lambda (a + B u_j) = a + B u_k
 *   TC : exists u    with Ad_lambda (a + B u)   = a + B u
 * solved in the least-squares sense; compatible iff the residual is < tol.
 */
template <LieGroup G>
std::vector<PairCompatibility> compatibility_check(const std::vector<G>& g,
                                                   const ControlSetting<G>& cs,
                                                   CompatibilityMode mode, double tol = 1e-9) {
  using Scalar = typename G::Scalar;
  std::vector<PairCompatibility> out;
  const int m = cs.controls();
  for (int j = 0; j < static_cast<int>(g.size()); ++j) {
    for (int k = j + 1; k < static_cast<int>(g.size()); ++k) {
      const auto ad = left_relative(g[k], g[j]).Ad();
      const auto eye = G::AdjointMatrix::Identity();
      MatrixX<Scalar> lhs;
      VectorX<Scalar> rhs = (eye - ad) * cs.drift;
      if (mode == CompatibilityMode::kLic) {
        lhs.resize(G::kDof, 2 * m);
        lhs.leftCols(m) = ad * cs.actuation;
        lhs.rightCols(m) = -cs.actuation;
      } else {
        lhs = (ad - eye) * cs.actuation;
      }
      const VectorX<Scalar> u = lhs.completeOrthogonalDecomposition().solve(rhs);
      const double residual = static_cast<double>((lhs * u - rhs).norm());
      out.push_back({j, k, residual < tol, residual});
    }
  }
  return out;
}

}  // namespace liecoord
