#pragma once

// Fixed-step closed-loop integration. Positions advance with the Lie-Euler
// map g <- g exp(h xi); auxiliary states use one of three schemes.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "liecoord/controller.hpp"
#include "liecoord/groups.hpp"

namespace liecoord {

enum class AuxIntegrator {
  kEuler,        // aux += h * rate
  kRk4,          // classical RK4 on aux with positions frozen over the step
  kTransported,  // consensus part by Euler, frame-transport part exactly
};

AuxIntegrator parse_aux_integrator(std::string_view name);
std::string_view to_string(AuxIntegrator integrator);

struct SimulationOptions {
  double step = 1e-3;
  double duration = 10.0;
  int reproject_every = 100;  // 0 disables
  int record_every = 10;
  AuxIntegrator aux_integrator = AuxIntegrator::kTransported;
  double blowup_norm = 1e12;
  double sign_tolerance = 1e-9;  // sign-condition values above this are logged
};

struct Metrics {
  double v_r = 0.0;   // sum_k sum_{j~>k} |xi_k - xi_j|^2
  double v_l = 0.0;   // sum_k sum_{j~>k} |Ad_{g_k} xi_k - Ad_{g_j} xi_j|^2
  double v_tr = 0.0;  // 1/2 sum_k sum_{j~>k} |eta_k - eta_j|^2
  double v_tl = 0.0;  // 1/2 sum_k sum_{j~>k} |Ad_{g_k} eta_k - Ad_{g_j} eta_j|^2
  std::vector<double> v_k;  // 1/2 |eta_k - Pi_C eta_k|^2 per agent

  double max_v_k() const {
    double m = 0.0;
    for (double v : v_k) m = std::max(m, v);
    return m;
  }
};

struct Event {
  double t = 0.0;
  std::string kind;
  int agent = -1;  // -1 when not agent-specific
  std::string detail;
};

template <LieGroup G>
struct SwarmState {
  using Aux = VectorX<typename G::Scalar>;
  double t = 0.0;
  std::vector<G> g;
  std::vector<Aux> aux;
};

template <LieGroup G>
struct Sample {
  double t = 0.0;
  std::vector<G> g;
  TangentVector<G> velocity;
  std::vector<VectorX<typename G::Scalar>> aux;
  TangentVector<G> reference;  // eta_k^l derived from aux
  Metrics metrics;
};

template <LieGroup G>
struct Trajectory {
  std::vector<Sample<G>> samples;
  std::vector<Event> events;
  bool aborted = false;
  std::string abort_reason;
  double step = 0.0;
};

template <LieGroup G>
Metrics compute_metrics(const std::vector<G>& g, const TangentVector<G>& xi,
                        const TangentVector<G>& eta, const CommGraph& graph, double t,
                        const ControlSetting<G>& cs) {
  Metrics m;
  const std::size_t n = g.size();
  TangentVector<G> xi_r(n), eta_r(n);
  for (std::size_t k = 0; k < n; ++k) {
    xi_r[k] = adjoint(g[k], xi[k]);
    eta_r[k] = adjoint(g[k], eta[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (int j : graph.in_neighbors(static_cast<int>(k), t)) {
      m.v_r += static_cast<double>((xi[k] - xi[j]).squaredNorm());
      m.v_l += static_cast<double>((xi_r[k] - xi_r[j]).squaredNorm());
      m.v_tr += 0.5 * static_cast<double>((eta[k] - eta[j]).squaredNorm());
      m.v_tl += 0.5 * static_cast<double>((eta_r[k] - eta_r[j]).squaredNorm());
    }
  }
  m.v_k.resize(n);
  for (std::size_t k = 0; k < n; ++k) m.v_k[k] = static_cast<double>(feasibility_cost(eta[k], cs));
  return m;
}

namespace detail {

template <LieGroup G>
void require_finite(const typename Controller<G>::Evaluation& e, double t) {
  for (std::size_t k = 0; k < e.velocity.size(); ++k) {
    if (!e.velocity[k].allFinite() || !e.aux_rate[k].allFinite()) {
      std::ostringstream os;
      os << "non-finite control output for agent " << k << " at t=" << t;
      throw NumericError(os.str());
    }
  }
}

template <LieGroup G>
void check_state(const SwarmState<G>& s) {
  if (s.g.empty()) throw UsageError("simulate: swarm has no agents");
  if (s.g.size() != s.aux.size()) throw UsageError("simulate: positions and aux differ in length");
}

}  // namespace detail

/// One integration step from a precomputed evaluation of the controller at `s`.
template <LieGroup G>
SwarmState<G> step(const SwarmState<G>& s, const Controller<G>& controller, const CommGraph& graph,
                   double h, AuxIntegrator integrator,
                   const typename Controller<G>::Evaluation& eval) {
  using Aux = VectorX<typename G::Scalar>;
  const std::size_t n = s.g.size();
  SwarmState<G> next;
  next.t = s.t + h;
  next.g.resize(n);
  next.aux.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    next.g[k] = s.g[k] * G::exp(h * eval.velocity[k]);
  }
  switch (integrator) {
    case AuxIntegrator::kEuler:
      for (std::size_t k = 0; k < n; ++k) next.aux[k] = s.aux[k] + h * eval.aux_rate[k];
      break;
    case AuxIntegrator::kTransported:
      for (std::size_t k = 0; k < n; ++k) {
        next.aux[k] = controller.transport(s.g[k], next.g[k],
                                           Aux(s.aux[k] + h * eval.consensus_rate[k]));
      }
      break;
    case AuxIntegrator::kRk4: {
      auto stage = [&](const std::vector<Aux>& base, const std::vector<Aux>& slope, double frac) {
        std::vector<Aux> a(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = base[k] + (frac * h) * slope[k];
        return controller.evaluate(s.g, a, graph, s.t + frac * h).aux_rate;
      };
      const auto& k1 = eval.aux_rate;
      const auto k2 = stage(s.aux, k1, 0.5);
      const auto k3 = stage(s.aux, k2, 0.5);
      const auto k4 = stage(s.aux, k3, 1.0);
      for (std::size_t k = 0; k < n; ++k) {
        next.aux[k] = s.aux[k] + (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
      }
      break;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!next.g[k].matrix().allFinite() || !next.aux[k].allFinite()) {
      std::ostringstream os;
      os << "non-finite state for agent " << k << " at t=" << next.t;
      throw NumericError(os.str());
    }
  }
  return next;
}

/// One integration step; evaluates the controller at `s` first.
template <LieGroup G>
SwarmState<G> step(const SwarmState<G>& s, const Controller<G>& controller, const CommGraph& graph,
                   double h, AuxIntegrator integrator = AuxIntegrator::kTransported) {
  detail::check_state(s);
  const auto eval = controller.evaluate(s.g, s.aux, graph, s.t);
  detail::require_finite<G>(eval, s.t);
  return step(s, controller, graph, h, integrator, eval);
}

/**
 * Integrates from `initial` over [t0, t0 + duration]. Samples are recorded
 * every `record_every` steps and at the final time. Blow-up (state or control
 * norm above `blowup_norm`) or a non-finite value stops the run and returns
 * the partial trajectory with `aborted` set.
 */
template <LieGroup G>
Trajectory<G> simulate(const SwarmState<G>& initial, const Controller<G>& controller,
                       const CommGraph& graph, const SimulationOptions& options) {
  detail::check_state(initial);
  if (!(options.step > 0.0) || !std::isfinite(options.step)) {
    throw UsageError("simulate: step must be positive");
  }
  if (!(options.duration >= 0.0) || !std::isfinite(options.duration)) {
    throw UsageError("simulate: duration must be non-negative");
  }
  if (options.record_every < 1) throw UsageError("simulate: record_every must be >= 1");
  if (options.reproject_every < 0) throw UsageError("simulate: reproject_every must be >= 0");
  detail::require_graph_size(graph, initial.g.size(), "simulate");
  for (const auto& a : initial.aux) {
    if (a.size() != controller.aux_size()) {
      throw UsageError("simulate: aux block size does not match controller '" +
                       std::string(controller.name()) + "'");
    }
  }

  const double h = options.step;
  const long steps = std::lround(options.duration / h);
  const std::size_t n = initial.g.size();
  Trajectory<G> traj;
  traj.step = h;

  std::vector<bool> sign_logged(n, false);
  long sign_violations = 0;
  long reprojections = 0;
  double max_correction = 0.0;

  auto abort = [&](double t, const std::string& why) {
    traj.aborted = true;
    traj.abort_reason = why;
    traj.events.push_back({t, "abort", -1, why});
  };

  SwarmState<G> state = initial;
  for (long i = 0;; ++i) {
    state.t = initial.t + static_cast<double>(i) * h;
    typename Controller<G>::Evaluation eval;
    try {
      eval = controller.evaluate(state.g, state.aux, graph, state.t);
      detail::require_finite<G>(eval, state.t);
    } catch (const NumericError& e) {
      abort(state.t, e.what());
      break;
    }

    double largest = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      largest = std::max({largest, static_cast<double>(eval.velocity[k].norm()),
                          static_cast<double>(state.aux[k].norm()),
                          static_cast<double>(state.g[k].matrix().norm())});
    }
    if (largest > options.blowup_norm) {
      std::ostringstream os;
      os << "blow-up: state or control norm " << largest << " exceeds " << options.blowup_norm;
      abort(state.t, os.str());
      break;
    }

    for (std::size_t k = 0; k < eval.sign_condition.size(); ++k) {
      if (static_cast<double>(eval.sign_condition[k]) > options.sign_tolerance) {
        ++sign_violations;
        if (!sign_logged[k]) {
          sign_logged[k] = true;
          std::ostringstream os;
          os << "value " << static_cast<double>(eval.sign_condition[k]);
          traj.events.push_back({state.t, "sign_condition_violated", static_cast<int>(k), os.str()});
        }
      }
    }

    if (i % options.record_every == 0 || i == steps) {
      Sample<G> s;
      s.t = state.t;
      s.g = state.g;
      s.velocity = eval.velocity;
      s.aux = state.aux;
      s.reference.resize(n);
      for (std::size_t k = 0; k < n; ++k) s.reference[k] = controller.reference_velocity(state.aux[k]);
      s.metrics = compute_metrics(state.g, s.velocity, s.reference, graph, state.t, controller.setting());
      traj.samples.push_back(std::move(s));
    }
    if (i == steps) break;

    try {
      state = step(state, controller, graph, h, options.aux_integrator, eval);
    } catch (const NumericError& e) {
      abort(state.t + h, e.what());
      break;
    }
    if (options.reproject_every > 0 && (i + 1) % options.reproject_every == 0) {
      for (std::size_t k = 0; k < n; ++k) {
        const G r = state.g[k].reprojected();
        max_correction = std::max(max_correction, static_cast<double>(distance(r, state.g[k])));
        state.g[k] = r;
      }
      ++reprojections;
    }
  }

  if (reprojections > 0) {
    std::ostringstream os;
    os << reprojections << " passes, max correction " << max_correction;
    traj.events.push_back({state.t, "reprojection", -1, os.str()});
  }
  if (sign_violations > 0) {
    std::ostringstream os;
    os << sign_violations << " agent-steps with positive sign condition";
    traj.events.push_back({state.t, "sign_condition_summary", -1, os.str()});
  }
  return traj;
}

inline AuxIntegrator parse_aux_integrator(std::string_view name) {
  if (name == "euler") return AuxIntegrator::kEuler;
  if (name == "rk4") return AuxIntegrator::kRk4;
  if (name == "transported") return AuxIntegrator::kTransported;
  throw UsageError("unknown aux integrator '" + std::string(name) +
                   "' (valid: euler, rk4, transported)");
}

inline std::string_view to_string(AuxIntegrator integrator) {
  switch (integrator) {
    case AuxIntegrator::kEuler: return "euler";
    case AuxIntegrator::kRk4: return "rk4";
    case AuxIntegrator::kTransported: return "transported";
  }
  return "transported";
}

}  // namespace liecoord
