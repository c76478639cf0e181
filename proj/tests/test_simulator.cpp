#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "liecoord/controller.hpp"
#include "liecoord/groups.hpp"
#include "liecoord/simulator.hpp"
#include "oracles.hpp"

using namespace liecoord;
using std::numbers::pi;

namespace {

template <LieGroup G>
SwarmState<G> state_of(std::vector<G> g, std::vector<typename G::Tangent> aux) {
  SwarmState<G> s;
  s.g = std::move(g);
  for (const auto& a : aux) s.aux.push_back(a);
  return s;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("one SE2 step moves along the heading") {
    const OpenLoop<SE2d> controller;
    const auto s = state_of<SE2d>({SE2d({1, 2}, pi / 3)}, {Eigen::Vector3d(1, 0, 0)});
    const auto next = step(s, controller, CommGraph::empty(1), 1.0);
    const Eigen::Vector2d expect = Eigen::Vector2d(1, 2) + Eigen::Vector2d(std::cos(pi / 3), std::sin(pi / 3));
    CHECK((next.g[0].translation() - expect).norm() < 1e-15);
    CHECK(next.g[0].angle() == doctest::Approx(pi / 3));
    CHECK(next.t == 1.0);
  }

  TEST_CASE("one SO3 step rotates by the commanded angle") {
    const OpenLoop<SO3d> controller;
    const auto s = state_of<SO3d>({SO3d::identity()}, {Eigen::Vector3d(0, 0, pi / 2)});
    const auto next = step(s, controller, CommGraph::empty(1), 1.0);
    Eigen::Matrix3d expect;
    expect << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    CHECK((next.g[0].rotation() - expect).norm() < 1e-15);
  }

  TEST_CASE("zero velocity leaves the state unchanged") {
    std::mt19937_64 rng(1);
    const OpenLoop<SE3d> controller;
    const SE3d g0 = SE3d::random(rng, 2.0);
    const auto s = state_of<SE3d>({g0}, {Vector6<double>::Zero()});
    SimulationOptions opt;
    opt.duration = 1.0;
    const auto traj = simulate(s, controller, CommGraph::empty(1), opt);
    CHECK(distance(traj.samples.back().g[0], g0) < 1e-14);
  }

  TEST_CASE("metrics on a two-agent SO3 example") {
    const std::vector<SO3d> g(2);
    const TangentVector<SO3d> eta{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()};
    const auto m = compute_metrics(g, eta, eta, CommGraph::complete(2), 0.0, ControlSetting<SO3d>{});
    CHECK(m.v_tl == doctest::Approx(2.0));
    CHECK(m.v_tr == doctest::Approx(2.0));
    CHECK(m.v_r == doctest::Approx(4.0));
    CHECK(m.v_l == doctest::Approx(4.0));
    CHECK(m.max_v_k() == 0.0);
    // A rotation of agent 2 changes the right-invariant quantities only.
    const std::vector<SO3d> turned{SO3d::identity(), SO3d::exp(Eigen::Vector3d(0, 0, -pi / 2))};
    const auto m2 = compute_metrics(turned, eta, eta, CommGraph::complete(2), 0.0, ControlSetting<SO3d>{});
    CHECK(m2.v_tl < 1e-30);
    CHECK(m2.v_tr == doctest::Approx(2.0));
  }

  TEST_CASE("simulation is deterministic") {
    std::mt19937_64 rng(2);
    const TcRightCascade<SE3d> controller;
    std::vector<SE3d> g;
    std::vector<Vector6<double>> aux;
    for (int k = 0; k < 3; ++k) {
      g.push_back(SE3d::random(rng, 2.0));
      aux.push_back(oracle::gaussian<SE3d>(rng));
    }
    const auto s = state_of<SE3d>(g, aux);
    SimulationOptions opt;
    opt.duration = 2.0;
    const auto a = simulate(s, controller, CommGraph::ring(3), opt);
    const auto b = simulate(s, controller, CommGraph::ring(3), opt);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      for (int k = 0; k < 3; ++k) CHECK(distance(a.samples[i].g[k], b.samples[i].g[k]) == 0.0);
  }

  TEST_CASE("samples cover the start and the final time") {
    const OpenLoop<SO3d> controller;
    const auto s = state_of<SO3d>({SO3d::identity()}, {Eigen::Vector3d(1, 0, 0)});
    SimulationOptions opt;
    opt.step = 0.01;
    opt.duration = 1.01;
    opt.record_every = 7;
    const auto traj = simulate(s, controller, CommGraph::empty(1), opt);
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.samples.back().t == doctest::Approx(1.01));
    CHECK(traj.samples.size() == 16);  // 0, 7, ..., 98, and 101
  }

  TEST_CASE("reprojection keeps positions on the manifold") {
    std::mt19937_64 rng(3);
    const OpenLoop<SO3d> controller;
    const auto s = state_of<SO3d>({SO3d::random(rng)}, {Eigen::Vector3d(3, -2, 5)});
    SimulationOptions opt;
    opt.step = 1e-3;
    opt.duration = 20.0;
    opt.reproject_every = 50;
    const auto traj = simulate(s, controller, CommGraph::empty(1), opt);
    for (const auto& sample : traj.samples) CHECK(sample.g[0].manifold_error() < kManifoldTolerance);
    bool logged = false;
    for (const auto& e : traj.events) logged = logged || e.kind == "reprojection";
    CHECK(logged);
  }

  TEST_CASE("blow-up aborts with a partial trajectory") {
    const OpenLoop<SE2d> controller;
    const auto s = state_of<SE2d>({SE2d::identity()}, {Eigen::Vector3d(1, 0, 0)});
    SimulationOptions opt;
    opt.step = 0.01;
    opt.duration = 100.0;
    opt.blowup_norm = 20.0;
    const auto traj = simulate(s, controller, CommGraph::empty(1), opt);
    CHECK(traj.aborted);
    CHECK(traj.abort_reason.find("blow-up") != std::string::npos);
    REQUIRE_FALSE(traj.samples.empty());
    CHECK(traj.samples.back().t < 20.0);
    CHECK(std::any_of(traj.events.begin(), traj.events.end(), [](const Event& e) { return e.kind == "abort"; }));
  }

  TEST_CASE("transported integration keeps right-invariant aux fixed without neighbors") {
    std::mt19937_64 rng(4);
    // Infeasible aux keeps the commanded velocity away from eta, so aux has to move.
    const UnderactuatedLic<SE3d> controller(se3_steering_setting<double>());
    std::vector<SE3d> g;
    std::vector<Vector6<double>> aux;
    for (int k = 0; k < 2; ++k) {
      g.push_back(SE3d::random(rng, 2.0));
      aux.push_back(oracle::gaussian<SE3d>(rng));
    }
    auto drift_after = [&](AuxIntegrator integrator) {
      SwarmState<SE3d> s = state_of<SE3d>(g, aux);
      for (int i = 0; i < 1000; ++i) s = step(s, controller, CommGraph::empty(2), 1e-3, integrator);
      double drift = 0;
      for (int k = 0; k < 2; ++k)
        drift = std::max(drift, (adjoint(s.g[k], Vector6<double>(s.aux[k])) - adjoint(g[k], aux[k])).norm());
      return drift;
    };
    CHECK(drift_after(AuxIntegrator::kTransported) < 1e-9);
    // The explicit update drifts at first order in h.
    CHECK(drift_after(AuxIntegrator::kEuler) > 1e-6);
  }

  TEST_CASE("sign-condition violations are logged once per agent") {
    ControlSetting<SE3d> cs;
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Random();
    Eigen::HouseholderQR<Eigen::Matrix<double, 6, 6>> qr(m);
    cs.actuation = Eigen::Matrix<double, 6, 6>(qr.householderQ()).leftCols(2);
    cs.drift << 0.2, -0.1, 0.4, 0.3, 0.0, -0.5;
    const auto check = check_theorem3_assumption(cs, 4000, 9);
    REQUIRE(check.witness);
    const UnderactuatedLic<SE3d> controller(cs);
    const auto s = state_of<SE3d>({SE3d::identity()}, {*check.witness});
    SimulationOptions opt;
    opt.step = 1e-3;
    opt.duration = 0.01;
    const auto traj = simulate(s, controller, CommGraph::empty(1), opt);
    int per_agent = 0;
    bool summary = false;
    for (const auto& e : traj.events) {
      per_agent += e.kind == "sign_condition_violated";
      summary = summary || e.kind == "sign_condition_summary";
    }
    CHECK(per_agent == 1);
    CHECK(summary);
  }

  TEST_CASE("invalid options and mismatched aux are usage errors") {
    const OpenLoop<SO3d> controller;
    const auto s = state_of<SO3d>({SO3d::identity()}, {Eigen::Vector3d::Zero()});
    SimulationOptions opt;
    opt.step = 0.0;
    CHECK_THROWS_AS(simulate(s, controller, CommGraph::empty(1), opt), UsageError);
    opt.step = 1e-3;
    opt.record_every = 0;
    CHECK_THROWS_AS(simulate(s, controller, CommGraph::empty(1), opt), UsageError);
    opt.record_every = 1;
    CHECK_THROWS_AS(simulate(s, controller, CommGraph::empty(2), opt), UsageError);
    SwarmState<SO3d> bad = s;
    bad.aux[0] = VectorX<double>::Zero(2);
    CHECK_THROWS_AS(simulate(bad, controller, CommGraph::empty(1), opt), UsageError);
  }

  TEST_CASE("aux integrator names") {
    for (auto i : {AuxIntegrator::kEuler, AuxIntegrator::kRk4, AuxIntegrator::kTransported})
      CHECK(parse_aux_integrator(to_string(i)) == i);
    CHECK_THROWS_AS(parse_aux_integrator("midpoint"), UsageError);
  }
}
