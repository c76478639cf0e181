#pragma once

// Post-hoc verification of coordination conditions on recorded trajectories,
// isotropy sets CM_xi / cm_xi, and generation of totally coordinated
// configurations.

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "liecoord/controller.hpp"
#include "liecoord/groups.hpp"
#include "liecoord/simulator.hpp"
#include "liecoord/steering.hpp"

namespace liecoord {

enum class CoordinationMode { kLic, kRic, kTc };

inline CoordinationMode parse_coordination_mode(std::string_view name) {
  if (name == "lic" || name == "LIC") return CoordinationMode::kLic;
  if (name == "ric" || name == "RIC") return CoordinationMode::kRic;
  if (name == "tc" || name == "TC") return CoordinationMode::kTc;
  throw UsageError("unknown coordination mode '" + std::string(name) + "' (valid: lic, ric, tc)");
}

inline std::string_view to_string(CoordinationMode mode) {
  switch (mode) {
    case CoordinationMode::kLic: return "lic";
    case CoordinationMode::kRic: return "ric";
    case CoordinationMode::kTc: return "tc";
  }
  return "tc";
}

/// Which measurement decides `achieved`. Both are always reported.
enum class CoordinationCriterion {
  kPosition,  // finite-difference drift of relative positions
  kVelocity,  // pairwise spread of xi^r (LIC) / xi^l (RIC)
};

struct CoordinationReport {
  bool achieved = false;
  double drift = 0.0;        // deciding value, compared against tol
  double left_drift = 0.0;   // max |d lambda_jk / dt|
  double right_drift = 0.0;  // max |d rho_jk / dt|
  double left_spread = 0.0;  // max |xi_j^r - xi_k^r|
  double right_spread = 0.0; // max |xi_j^l - xi_k^l|
  double window_start = 0.0;
  double window_end = 0.0;
  int samples = 0;
};

/**
 * Coordination check over the trailing `window` seconds of a trajectory
 * (window <= 0 selects the last 10% of it). Drift is the largest Frobenius
 * norm of the central finite difference of lambda_jk (LIC) or rho_jk (RIC)
 * over all ordered pairs; TC takes the larger of the two.
 *
 * Throws UsageError when the window holds fewer than three samples or
 * exceeds the trajectory span.
 */
template <LieGroup G>
CoordinationReport check_coordination(const Trajectory<G>& traj, CoordinationMode mode,
                                      double tol = 1e-4, double window = 0.0,
                                      CoordinationCriterion criterion = CoordinationCriterion::kPosition) {
  const auto& s = traj.samples;
  if (s.size() < 3) throw UsageError("check_coordination: window too short (fewer than 3 samples)");
  const double t0 = s.front().t;
  const double t1 = s.back().t;
  if (window <= 0.0) window = 0.1 * (t1 - t0);
  if (window > t1 - t0 + 1e-12) throw UsageError("check_coordination: window exceeds trajectory span");
  const double start = t1 - window;
  std::size_t first = 0;
  while (first < s.size() && s[first].t < start - 1e-12) ++first;
  if (s.size() - first < 3) throw UsageError("check_coordination: window too short (fewer than 3 samples)");

  CoordinationReport r;
  r.window_start = s[first].t;
  r.window_end = t1;
  r.samples = static_cast<int>(s.size() - first);
  const std::size_t n = s.front().g.size();

  for (std::size_t i = first; i < s.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto xr_j = adjoint(s[i].g[j], s[i].velocity[j]);
      for (std::size_t k = j + 1; k < n; ++k) {
        const auto xr_k = adjoint(s[i].g[k], s[i].velocity[k]);
        r.left_spread = std::max(r.left_spread, static_cast<double>((xr_j - xr_k).norm()));
        r.right_spread =
            std::max(r.right_spread, static_cast<double>((s[i].velocity[j] - s[i].velocity[k]).norm()));
      }
    }
  }
  // Central differences need a neighbor on each side inside the window.
  for (std::size_t i = first + 1; i + 1 < s.size(); ++i) {
    const double dt = s[i + 1].t - s[i - 1].t;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (j == k) continue;
        const typename G::MatrixType dl = left_relative(s[i + 1].g[k], s[i + 1].g[j]).matrix() -
                                            left_relative(s[i - 1].g[k], s[i - 1].g[j]).matrix();
        const typename G::MatrixType dr = right_relative(s[i + 1].g[k], s[i + 1].g[j]).matrix() -
                                            right_relative(s[i - 1].g[k], s[i - 1].g[j]).matrix();
        r.left_drift = std::max(r.left_drift, static_cast<double>(dl.norm()) / dt);
        r.right_drift = std::max(r.right_drift, static_cast<double>(dr.norm()) / dt);
      }
    }
  }

  const bool by_position = criterion == CoordinationCriterion::kPosition;
  const double left = by_position ? r.left_drift : r.left_spread;
  const double right = by_position ? r.right_drift : r.right_spread;
  switch (mode) {
    case CoordinationMode::kLic: r.drift = left; break;
    case CoordinationMode::kRic: r.drift = right; break;
    case CoordinationMode::kTc: r.drift = std::max(left, right); break;
  }
  r.achieved = r.drift < tol;
  return r;
}

/// g in CM_xi iff |Ad_g xi - xi| < tol.
template <LieGroup G>
bool cm_membership(const G& g, const typename G::Tangent& xi, double tol = 1e-9) {
  return static_cast<double>((adjoint(g, xi) - xi).norm()) < tol;
}

/// Orthonormal basis (columns) of cm_xi = ker ad_xi, rank cut at 1e-9 relative.
template <LieGroup G>
MatrixX<typename G::Scalar> isotropy_algebra_basis(const typename G::Tangent& xi) {
  using Scalar = typename G::Scalar;
  const typename G::AdjointMatrix ad = G::ad(xi);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(MatrixX<Scalar>(ad), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Scalar cut = sv.size() > 0 ? Scalar(1e-9) * sv(0) : Scalar(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > Scalar(0)) ++rank;
  return svd.matrixV().rightCols(G::kDof - rank);
}

/// dim cm_xi = n - rank(ad_xi).
template <LieGroup G>
int cm_algebra_dimension(const typename G::Tangent& xi) {
  return static_cast<int>(isotropy_algebra_basis<G>(xi).cols());
}

/// Random element of CM_xi: a product of `factors` exponentials exp(s eta), eta in ker ad_xi.
template <LieGroup G, typename Rng>
G random_isotropy_element(const typename G::Tangent& xi, Rng& rng, double scale = 1.0, int factors = 3) {
  const auto basis = isotropy_algebra_basis<G>(xi);
  std::normal_distribution<double> normal(0.0, scale);
  G m = G::identity();
  for (int f = 0; f < factors; ++f) {
    typename G::Tangent eta = G::Tangent::Zero();
    for (int c = 0; c < basis.cols(); ++c) eta += typename G::Scalar(normal(rng)) * basis.col(c);
    m = m * G::exp(eta);
  }
  return m;
}

/**
 * Positions with lambda_jk in CM_xi along every edge of `tree`, hence for
 * every pair. Agent 0 (or the tree root reached first) gets a random
 * position; each child is its parent times a random element of CM_xi.
 * Throws UsageError unless `tree` is a spanning tree on N agents.
 */
template <LieGroup G, typename Rng>
std::vector<G> generate_tc_configuration(const typename G::Tangent& xi, int agents,
                                         const std::vector<std::pair<int, int>>& tree, Rng& rng,
                                         double scale = 1.0) {
  if (agents < 1) throw UsageError("generate_tc_configuration: agent count must be >= 1");
  if (static_cast<int>(tree.size()) != agents - 1) {
    throw UsageError("generate_tc_configuration: a spanning tree on N agents has N-1 edges");
  }
  std::vector<std::vector<int>> adj(agents);
  for (auto [a, b] : tree) {
    if (a < 0 || b < 0 || a >= agents || b >= agents || a == b) {
      throw UsageError("generate_tc_configuration: invalid tree edge");
    }
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<G> g(agents);
  std::vector<bool> placed(agents, false);
  g[0] = G::random(rng, typename G::Scalar(scale));
  placed[0] = true;
  std::vector<int> queue{0};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int p = queue[q];
    for (int c : adj[p]) {
      if (placed[c]) continue;
      g[c] = g[p] * random_isotropy_element<G>(xi, rng, scale);
      placed[c] = true;
      queue.push_back(c);
    }
  }
  if (static_cast<int>(queue.size()) != agents) {
    throw UsageError("generate_tc_configuration: tree does not span all agents");
  }
  return g;
}

struct TcVelocityResiduals {
  double left = 0.0;   // max |Ad_{lambda_jk} xi^l - xi^l|
  double right = 0.0;  // max |Ad_{rho_jk} xi^r - xi^r|, xi^r = Ad_{g_0} xi^l
};

/// Both sides of the TC velocity condition for a common left velocity.
template <LieGroup G>
TcVelocityResiduals tc_velocity_residuals(const std::vector<G>& g, const typename G::Tangent& xi_l) {
  TcVelocityResiduals out;
  if (g.empty()) return out;
  const typename G::Tangent xi_r = adjoint(g[0], xi_l);
  for (std::size_t j = 0; j < g.size(); ++j) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (j == k) continue;
      out.left = std::max(out.left, static_cast<double>(
                                        (adjoint(left_relative(g[k], g[j]), xi_l) - xi_l).norm()));
      out.right = std::max(out.right, static_cast<double>(
                                          (adjoint(right_relative(g[k], g[j]), xi_r) - xi_r).norm()));
    }
  }
  return out;
}

/**
 * Exploratory: basis of the common left velocities compatible with TC at
 * fixed positions, i.e. the intersection over pairs of ker(Ad_{lambda_jk} - I).
 * For non-abelian groups and enough agents this is generically {0}.
 */
template <LieGroup G>
MatrixX<typename G::Scalar> compatible_velocity_basis(const std::vector<G>& g) {
  using Scalar = typename G::Scalar;
  const int n = G::kDof;
  const int pairs = static_cast<int>(g.size() * (g.size() > 0 ? g.size() - 1 : 0));
  if (pairs == 0) return MatrixX<Scalar>::Identity(n, n);
  MatrixX<Scalar> stacked(pairs * n, n);
  int row = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (j == k) continue;
      stacked.middleRows(row, n) =
          left_relative(g[k], g[j]).Ad() - MatrixX<Scalar>::Identity(n, n);
      row += n;
    }
  }
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Scalar cut = std::max(Scalar(1e-9) * (sv.size() ? sv(0) : Scalar(0)), Scalar(1e-12));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

/// SE(2) steering: Ad_g(e1, u) = alpha + Bu with alpha = (Q e1 - u J r, 0).
template <typename Scalar>
struct Se2SteeringSplit {
  Vector3<Scalar> alpha;
  Vector3<Scalar> actuated;  // Bu
  Scalar inner = 0;          // alpha . Bu
};

template <typename Scalar>
Se2SteeringSplit<Scalar> se2_steering_split(const SE2<Scalar>& g, Scalar u) {
  const auto cs = se2_steering_setting<Scalar>();
  VectorX<Scalar> uu(1);
  uu(0) = u;
  Se2SteeringSplit<Scalar> out;
  out.actuated = cs.actuation * uu;
  out.alpha = adjoint(g, cs.velocity(uu)) - out.actuated;
  out.inner = out.alpha.dot(out.actuated);
  return out;
}

/// SE(3) analogue of the split condition: (Q u) . (Q e1) = u . e1, nonzero in general.
template <typename Scalar>
Scalar se3_steering_split_inner(const SE3<Scalar>& g, const Vector3<Scalar>& u) {
  return (g.rotation() * u).dot(g.rotation() * Vector3<Scalar>::UnitX());
}

struct Se2EquivalenceReport {
  bool holds = false;
  double max_inner = 0.0;       // largest |alpha . Bu| over samples
  double max_infeasible = 0.0;  // largest distance of xi^l from C
  bool lic = false;
  bool ric = false;
};

/**
 * SE(2) steering: checks the perpendicular split on every recorded state
 * and that reaching LIC implies RIC within `tol`.
 */
template <typename Scalar>
Se2EquivalenceReport check_se2_lic_tc_equivalence(const Trajectory<SE2<Scalar>>& traj, double tol = 1e-4,
                                                  double window = 0.0) {
  const auto cs = se2_steering_setting<Scalar>();
  Se2EquivalenceReport r;
  for (const auto& s : traj.samples) {
    for (std::size_t k = 0; k < s.g.size(); ++k) {
      const auto split = se2_steering_split(s.g[k], s.velocity[k](2));
      r.max_inner = std::max(r.max_inner, std::abs(static_cast<double>(split.inner)));
      r.max_infeasible = std::max(r.max_infeasible, static_cast<double>(cs.distance(s.velocity[k])));
    }
  }
  const auto lic = check_coordination(traj, CoordinationMode::kLic, tol, window, CoordinationCriterion::kVelocity);
  const auto ric = check_coordination(traj, CoordinationMode::kRic, tol, window, CoordinationCriterion::kVelocity);
  r.lic = lic.achieved;
  r.ric = ric.achieved;
  r.holds = r.max_inner < 1e-12 && r.max_infeasible < 1e-12 && (!r.lic || r.ric);
  return r;
}

struct BasinProbeOptions {
  int agents = 4;
  double step = 1e-3;
  double duration = 30.0;
  double tol = 1e-6;       // terminal V_tl threshold for "reached TC"
  double aux_scale = 1.0;  // std dev of initial eta^l entries
  AuxIntegrator aux_integrator = AuxIntegrator::kTransported;
};

struct BasinProbeResult {
  int trials = 0;
  int reached = 0;
  double fraction = 0.0;
  std::vector<double> terminal_v_tl;
};

/// Initial swarm for one basin-probe trial: Haar rotations, Gaussian eta^l.
inline SwarmState<SO3d> basin_probe_initial(int agents, double aux_scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SwarmState<SO3d> s;
  for (int k = 0; k < agents; ++k) s.g.push_back(SO3d::random(rng));
  for (int k = 0; k < agents; ++k) s.aux.push_back(random_tangent<SO3d>(rng, aux_scale));
  return s;
}

/**
 * Runs tc_left_cascade on SO(3) from `trials` random initial conditions
 * (seeds seed0, seed0+1, ...) and reports the share ending with V_tl < tol.
 */
inline BasinProbeResult prop4_basin_probe(const CommGraph& graph, int trials, std::uint64_t seed0,
                                          const BasinProbeOptions& opt = {}) {
  if (trials < 0) throw UsageError("prop4_basin_probe: trials must be >= 0");
  if (graph.size() != opt.agents) throw UsageError("prop4_basin_probe: graph size does not match agents");
  const TcLeftCascade<SO3d> controller;
  SimulationOptions so;
  so.step = opt.step;
  so.duration = opt.duration;
  so.record_every = std::max(1, static_cast<int>(std::lround(opt.duration / opt.step)));
  so.aux_integrator = opt.aux_integrator;
  BasinProbeResult r;
  r.trials = trials;
  for (int i = 0; i < trials; ++i) {
    const auto traj = simulate(basin_probe_initial(opt.agents, opt.aux_scale, seed0 + i), controller, graph, so);
    const double v = traj.aborted ? INFINITY : traj.samples.back().metrics.v_tl;
    r.terminal_v_tl.push_back(v);
    if (v < opt.tol) ++r.reached;
  }
  r.fraction = trials > 0 ? static_cast<double>(r.reached) / trials : 0.0;
  return r;
}

/**
 * Saddle of the tc_left_cascade flow: all eta^l = e3, agents split into two
 * groups whose spatial velocities Q_k e3 are anti-aligned; each rotation is
 * then perturbed by exp(eps * random unit axis).
 */
inline SwarmState<SO3d> anti_aligned_saddle(int agents, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SwarmState<SO3d> s;
  const SO3d flip = SO3d::exp(Vector3<double>(M_PI, 0.0, 0.0));
  for (int k = 0; k < agents; ++k) {
    Vector3<double> axis = random_tangent<SO3d>(rng, 1.0);
    axis.normalize();
    const SO3d base = (k % 2 == 0) ? SO3d::identity() : flip;
    s.g.push_back(base * SO3d::exp(eps * axis));
    s.aux.push_back(Vector3<double>::UnitZ());
  }
  return s;
}

}  // namespace liecoord
