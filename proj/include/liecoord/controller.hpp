#pragma once

// Closed-loop controller objects used by the simulator. Each one wraps a pure
// right-hand side from controllers.hpp / steering.hpp and describes its
// per-agent auxiliary state.

#include <memory>
#include <random>
#include <string_view>
#include <vector>

#include "liecoord/control_setting.hpp"
#include "liecoord/controllers.hpp"
#include "liecoord/graph.hpp"
#include "liecoord/lie.hpp"
#include "liecoord/steering.hpp"

namespace liecoord {

template <LieGroup G>
class Controller {
 public:
  using Scalar = typename G::Scalar;
  using Tangent = typename G::Tangent;
  using Aux = VectorX<Scalar>;

  struct Evaluation {
    TangentVector<G> velocity;           // xi_k^l
    std::vector<Aux> aux_rate;           // full d aux_k / dt
    std::vector<Aux> consensus_rate;     // aux_rate minus the frame-transport term
    std::vector<Scalar> sign_condition;  // empty unless the controller monitors it
  };

  virtual ~Controller() = default;

  virtual std::string_view name() const = 0;
  virtual int aux_size() const = 0;
  virtual Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux,
                              const CommGraph& graph, double t) const = 0;

  /// Left-invariant auxiliary velocity eta_k^l carried by one aux block.
  virtual Tangent reference_velocity(const Aux& aux) const = 0;

  /// Re-expresses an aux block from the body frame at `from` into the body
  /// frame at `to`. Identity for controllers whose aux lives in a fixed frame.
  virtual Aux transport(const G& /*from*/, const G& /*to*/, const Aux& aux) const { return aux; }

  /// Random feasible initial aux block.
  virtual Aux sample_aux(std::mt19937_64& rng, double scale) const {
    return setting_.project(random_tangent<G>(rng, scale));
  }

  const ControlSetting<G>& setting() const { return setting_; }

  /// True when the aux block is itself the commanded velocity.
  virtual bool aux_is_velocity() const { return false; }

 protected:
  Controller() = default;
  explicit Controller(ControlSetting<G> cs) : setting_(std::move(cs)) { setting_.validate(); }

  static std::vector<Tangent> unpack(const std::vector<Aux>& aux) {
    std::vector<Tangent> out(aux.size());
    for (std::size_t k = 0; k < aux.size(); ++k) out[k] = aux[k];
    return out;
  }
  static std::vector<Aux> pack(const std::vector<Tangent>& v) {
    std::vector<Aux> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k];
    return out;
  }
  /// Ad_{to^-1 from} aux: keeps Ad_g aux fixed across a group update.
  static Aux adjoint_transport(const G& from, const G& to, const Aux& aux) {
    return Aux(adjoint(to.inverse() * from, Tangent(aux)));
  }

  ControlSetting<G> setting_;
};

/// Constant commanded velocities: aux_k = xi_k^l, no dynamics.
template <LieGroup G>
class OpenLoop final : public Controller<G> {
 public:
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  std::string_view name() const override { return "open_loop"; }
  int aux_size() const override { return G::kDof; }
  bool aux_is_velocity() const override { return true; }
  Tangent reference_velocity(const Aux& aux) const override { return aux; }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph&,
                      double) const override {
    detail::require_same_size(g, aux, "open_loop");
    std::vector<Aux> zero(aux.size(), Aux::Zero(G::kDof));
    return {this->unpack(aux), zero, zero, {}};
  }
};

/// Consensus on left velocities (right-invariant coordination).
template <LieGroup G>
class RicConsensus final : public Controller<G> {
 public:
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  std::string_view name() const override { return "ric_consensus"; }
  int aux_size() const override { return G::kDof; }
  bool aux_is_velocity() const override { return true; }
  Tangent reference_velocity(const Aux& aux) const override { return aux; }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    detail::require_same_size(g, aux, "ric_consensus");
    const auto xi = this->unpack(aux);
    const auto rate = this->pack(ric_consensus_rhs(xi, graph, t));
    return {xi, rate, rate, {}};
  }
};

/// Consensus on right velocities in left coordinates (left-invariant coordination).
template <LieGroup G>
class LicConsensus final : public Controller<G> {
 public:
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  std::string_view name() const override { return "lic_consensus"; }
  int aux_size() const override { return G::kDof; }
  bool aux_is_velocity() const override { return true; }
  Tangent reference_velocity(const Aux& aux) const override { return aux; }
  Aux transport(const G& from, const G& to, const Aux& aux) const override {
    return this->adjoint_transport(from, to, aux);
  }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    const auto xi = this->unpack(aux);
    const auto rate = this->pack(lic_consensus_rhs(g, xi, graph, t));
    return {xi, rate, rate, {}};
  }
};

/// Experimental: gradient of V_l + V_r on velocities (sum of both consensus
/// laws). No convergence claim is attached to it.
template <LieGroup G>
class CombinedVelocityConsensus final : public Controller<G> {
 public:
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  std::string_view name() const override { return "combined_velocity_consensus"; }
  int aux_size() const override { return G::kDof; }
  bool aux_is_velocity() const override { return true; }
  Tangent reference_velocity(const Aux& aux) const override { return aux; }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    const auto xi = this->unpack(aux);
    const auto ric = ric_consensus_rhs(xi, graph, t);
    const auto lic = lic_consensus_rhs(g, xi, graph, t);
    std::vector<Aux> rate(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) rate[k] = ric[k] + lic[k];
    return {xi, rate, rate, {}};
  }
};

template <LieGroup G>
class TcRightCascade final : public Controller<G> {
 public:
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  std::string_view name() const override { return "tc_right_cascade"; }
  int aux_size() const override { return G::kDof; }
  Tangent reference_velocity(const Aux& aux) const override { return aux; }
  Aux transport(const G& from, const G& to, const Aux& aux) const override {
    return this->adjoint_transport(from, to, aux);
  }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    const auto eta = this->unpack(aux);
    const auto rates = tc_right_cascade_rhs(g, eta, graph, t);
    Evaluation out{rates.velocity, this->pack(rates.aux_rate), {}, {}};
    out.consensus_rate.resize(eta.size());
    for (std::size_t k = 0; k < eta.size(); ++k) {
      out.consensus_rate[k] = rates.aux_rate[k] + G::bracket(rates.velocity[k], eta[k]);
    }
    return out;
  }
};

template <LieGroup G>
class TcLeftCascade final : public Controller<G> {
 public:
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  explicit TcLeftCascade(ControlSetting<G> cs = ControlSetting<G>::fully_actuated())
      : Controller<G>(std::move(cs)) {}

  std::string_view name() const override { return "tc_left_cascade"; }
  int aux_size() const override { return G::kDof; }
  Tangent reference_velocity(const Aux& aux) const override { return aux; }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    const auto rates = tc_left_cascade_rhs(g, this->unpack(aux), graph, t, this->setting_);
    auto rate = this->pack(rates.aux_rate);
    return {rates.velocity, rate, rate, {}};
  }
};

template <LieGroup G>
class UnderactuatedLic final : public Controller<G> {
 public:
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  explicit UnderactuatedLic(ControlSetting<G> cs) : Controller<G>(std::move(cs)) {}

  std::string_view name() const override { return "underactuated_lic"; }
  int aux_size() const override { return G::kDof; }
  Tangent reference_velocity(const Aux& aux) const override { return aux; }
  Aux transport(const G& from, const G& to, const Aux& aux) const override {
    return this->adjoint_transport(from, to, aux);
  }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    const auto eta = this->unpack(aux);
    const auto rates = underactuated_lic_rhs(g, eta, graph, t, this->setting_);
    Evaluation out{rates.velocity, this->pack(rates.aux_rate), {}, rates.sign_condition};
    out.consensus_rate.resize(eta.size());
    for (std::size_t k = 0; k < eta.size(); ++k) {
      out.consensus_rate[k] = rates.aux_rate[k] + G::bracket(rates.velocity[k], eta[k]);
    }
    return out;
  }
};

/**
 * SE(3) steering in straight-line mode. Aux block: eta_v (3 values); the
 * angular part of eta is held at zero. With `normalize` the position
 * controller acts on eta_v / |eta_v|, which only rescales the feedback gain
 * and makes the common reference reachable (|eta_v^r| = 1).
 */
template <typename Scalar = double>
class Se3SteeringLinear final : public Controller<SE3<Scalar>> {
 public:
  using G = SE3<Scalar>;
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  explicit Se3SteeringLinear(bool normalize = true)
      : Controller<G>(se3_steering_setting<Scalar>()), normalize_(normalize) {}

  std::string_view name() const override { return "se3_steering_linear"; }
  int aux_size() const override { return 3; }
  bool normalizes() const { return normalize_; }

  Tangent reference_velocity(const Aux& aux) const override {
    Vector3<Scalar> v = aux;
    if (normalize_ && v.norm() > Scalar(0)) v.normalize();
    Tangent eta = Tangent::Zero();
    eta.template head<3>() = v;
    return eta;
  }
  Aux transport(const G& from, const G& to, const Aux& aux) const override {
    return Aux(to.rotation().transpose() * from.rotation() * Vector3<Scalar>(aux));
  }
  Aux sample_aux(std::mt19937_64& rng, double scale) const override {
    std::normal_distribution<double> normal(0.0, scale);
    Aux a(3);
    for (int i = 0; i < 3; ++i) a(i) = Scalar(normal(rng));
    return a;
  }
  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    const std::size_t n = g.size();
    detail::require_same_size(g, aux, "se3_steering_linear");
    std::vector<Vector3<Scalar>> eta_v(n), u(n);
    Evaluation out;
    out.velocity.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      eta_v[k] = aux[k];
      u[k] = se3_steering_control<Scalar>(reference_velocity(aux[k]));
      out.velocity[k] = this->setting_.velocity(u[k]);
    }
    const auto rate = se3_steering_consensus_linear_rhs(g, eta_v, graph, t, u);
    out.aux_rate.resize(n);
    out.consensus_rate.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      out.aux_rate[k] = rate[k];
      out.consensus_rate[k] = rate[k] + u[k].cross(eta_v[k]);
    }
    return out;
  }

 private:
  bool normalize_;
};

/// SE(3) steering in helical mode. Aux block: (alpha, beta, gamma), 9 values.
template <typename Scalar = double>
class Se3SteeringHelical final : public Controller<SE3<Scalar>> {
 public:
  using G = SE3<Scalar>;
  using typename Controller<G>::Aux;
  using typename Controller<G>::Evaluation;
  using typename Controller<G>::Tangent;

  Se3SteeringHelical() : Controller<G>(se3_steering_setting<Scalar>()) {}

  std::string_view name() const override { return "se3_steering_helical"; }
  int aux_size() const override { return 9; }

  static HelicalAux<Scalar> unpack_triple(const Aux& aux) {
    return {aux.template segment<3>(0), aux.template segment<3>(3), aux.template segment<3>(6)};
  }
  static Aux pack_triple(const HelicalAux<Scalar>& h) {
    Aux a(9);
    a << h.alpha, h.beta, h.gamma;
    return a;
  }

  Tangent reference_velocity(const Aux& aux) const override { return unpack_triple(aux).eta(); }

  /// alpha, gamma are body-frame directions; beta is a body-frame point.
  Aux transport(const G& from, const G& to, const Aux& aux) const override {
    const auto h = unpack_triple(aux);
    const Matrix3<Scalar> qt = to.rotation().transpose();
    const Matrix3<Scalar> rel = qt * from.rotation();
    HelicalAux<Scalar> out;
    out.alpha = rel * h.alpha;
    out.beta = qt * (from.rotation() * h.beta + from.translation() - to.translation());
    out.gamma = rel * h.gamma;
    return pack_triple(out);
  }

  /// gamma is drawn inside the unit ball so that the agreed reference is reachable.
  Aux sample_aux(std::mt19937_64& rng, double scale) const override {
    std::normal_distribution<double> normal(0.0, scale);
    HelicalAux<Scalar> h;
    for (int i = 0; i < 3; ++i) h.alpha(i) = Scalar(normal(rng));
    for (int i = 0; i < 3; ++i) h.beta(i) = Scalar(normal(rng));
    for (int i = 0; i < 3; ++i) h.gamma(i) = Scalar(normal(rng));
    if (h.gamma.norm() > Scalar(1)) h.gamma.normalize();
    return pack_triple(h);
  }

  Evaluation evaluate(const std::vector<G>& g, const std::vector<Aux>& aux, const CommGraph& graph,
                      double t) const override {
    const std::size_t n = g.size();
    detail::require_same_size(g, aux, "se3_steering_helical");
    std::vector<HelicalAux<Scalar>> triples(n);
    std::vector<Vector3<Scalar>> u(n);
    Evaluation out;
    out.velocity.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      triples[k] = unpack_triple(aux[k]);
      u[k] = se3_steering_control<Scalar>(triples[k].eta());
      out.velocity[k] = this->setting_.velocity(u[k]);
    }
    const auto rate = se3_steering_consensus_helical_rhs(g, triples, graph, t, u);
    out.aux_rate.resize(n);
    out.consensus_rate.resize(n);
    const Vector3<Scalar> e1 = Vector3<Scalar>::UnitX();
    for (std::size_t k = 0; k < n; ++k) {
      out.aux_rate[k] = pack_triple(rate[k]);
      HelicalAux<Scalar> c = rate[k];
      c.alpha += u[k].cross(triples[k].alpha);
      c.beta += u[k].cross(triples[k].beta) + e1;
      c.gamma += u[k].cross(triples[k].gamma);
      out.consensus_rate[k] = pack_triple(c);
    }
    return out;
  }
};

}  // namespace liecoord
