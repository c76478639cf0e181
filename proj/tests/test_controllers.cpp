#include <doctest.h>

#include "liecoord/controller.hpp"
#include "liecoord/groups.hpp"
#include "oracles.hpp"

using namespace liecoord;

namespace {

template <typename G>
struct Swarm {
  std::vector<G> g;
  TangentVector<G> eta;
};

template <typename G>
Swarm<G> random_swarm(std::mt19937_64& rng, int n, double scale = 1.0) {
  Swarm<G> s;
  for (int k = 0; k < n; ++k) s.g.push_back(G::random(rng, 2.0));
  for (int k = 0; k < n; ++k) s.eta.push_back(oracle::gaussian<G>(rng, scale));
  return s;
}

/// Sets eta_k = Ad_{g_k}^-1 eta_bar so that all right-invariant aux agree.
template <typename G>
void align_right(Swarm<G>& s, const typename G::Tangent& eta_bar) {
  for (std::size_t k = 0; k < s.g.size(); ++k) s.eta[k] = adjoint(s.g[k].inverse(), eta_bar);
}

template <typename G>
double v_tr(const TangentVector<G>& eta, const CommGraph& graph) {
  double v = 0;
  for (int k = 0; k < graph.size(); ++k)
    for (int j : graph.in_neighbors(k, 0.0)) v += 0.5 * (eta[k] - eta[j]).squaredNorm();
  return v;
}

template <typename G>
double v_tl(const std::vector<G>& g, const TangentVector<G>& eta, const CommGraph& graph) {
  double v = 0;
  for (int k = 0; k < graph.size(); ++k)
    for (int j : graph.in_neighbors(k, 0.0))
      v += 0.5 * (oracle::adjoint(g[k], eta[k]) - oracle::adjoint(g[j], eta[j])).squaredNorm();
  return v;
}

}  // namespace

TEST_SUITE("controllers") {
  TEST_CASE("vector consensus equals minus the Laplacian") {
    std::mt19937_64 rng(1);
    const CommGraph graph = CommGraph::ring(5);
    std::vector<Eigen::Vector3d> xi;
    Eigen::MatrixXd stacked(5, 3);
    for (int k = 0; k < 5; ++k) {
      xi.push_back(oracle::gaussian<SO3d>(rng));
      stacked.row(k) = xi.back().transpose();
    }
    const auto rate = ric_consensus_rhs(xi, graph, 0.0);
    const Eigen::MatrixXd expect = -graph.laplacian() * stacked;
    for (int k = 0; k < 5; ++k) CHECK((rate[k] - expect.row(k).transpose()).norm() < 1e-14);
  }

  TEST_CASE("left-coordinate consensus is vector consensus on right velocities") {
    auto check = [](auto tag) {
      using G = decltype(tag);
      std::mt19937_64 rng(2);
      const auto s = random_swarm<G>(rng, 4);
      const CommGraph graph = CommGraph::directed_chain(4);
      const auto rate = lic_consensus_rhs(s.g, s.eta, graph, 0.0);
      TangentVector<G> right(4);
      for (int k = 0; k < 4; ++k) right[k] = oracle::adjoint(s.g[k], s.eta[k]);
      const auto right_rate = ric_consensus_rhs(right, graph, 0.0);
      for (int k = 0; k < 4; ++k) {
        CHECK((oracle::adjoint(s.g[k], rate[k]) - right_rate[k]).norm() < 1e-10);
      }
    };
    check(SO3d{});
    check(SE2d{});
    check(SE3d{});
  }

  TEST_CASE("tc_right: V_tr decreases at rate -2 sum |xi - eta|^2 once eta^r agree") {
    auto check = [](auto tag) {
      using G = decltype(tag);
      oracle::for_samples(3, 20, [](auto& rng, int) {
        const CommGraph graph = CommGraph::complete(4);
        auto s = random_swarm<G>(rng, 4);
        align_right(s, oracle::gaussian<G>(rng));
        const auto rates = tc_right_cascade_rhs(s.g, s.eta, graph, 0.0);
        double expect = 0;
        for (int k = 0; k < 4; ++k) expect -= 2 * (rates.velocity[k] - s.eta[k]).squaredNorm();
        const double h = 1e-6;
        TangentVector<G> plus(4), minus(4);
        for (int k = 0; k < 4; ++k) {
          plus[k] = s.eta[k] + h * rates.aux_rate[k];
          minus[k] = s.eta[k] - h * rates.aux_rate[k];
        }
        const double fd = (v_tr<G>(plus, graph) - v_tr<G>(minus, graph)) / (2 * h);
        CHECK(fd == doctest::Approx(expect).epsilon(1e-5).scale(1.0));
        CHECK(expect <= 0.0);
      });
    };
    check(SO3d{});
    check(SE2d{});
    check(SE3d{});
  }

  TEST_CASE("tc_right with eta^r frozen is the double bracket flow on SO3") {
    oracle::for_samples(4, 50, [](auto& rng, int) {
      const CommGraph graph = CommGraph::ring(4);
      auto s = random_swarm<SO3d>(rng, 4);
      align_right(s, oracle::gaussian<SO3d>(rng));
      const auto rates = tc_right_cascade_rhs(s.g, s.eta, graph, 0.0);
      for (int k = 0; k < 4; ++k) {
        TangentVector<SO3d> nb;
        for (int j : graph.in_neighbors(k, 0.0)) nb.push_back(s.eta[j]);
        CHECK((rates.aux_rate[k] - double_bracket_rhs<SO3d>(s.eta[k], nb)).norm() < 1e-10);
        // Norm-preserving direction.
        CHECK(std::abs(rates.aux_rate[k].dot(s.eta[k])) < 1e-12);
      }
    });
  }

  TEST_CASE("tc_left on SO3: V_tl decreases at rate -2 sum |xi - eta|^2 once eta^l agree") {
    oracle::for_samples(5, 20, [](auto& rng, int) {
      const CommGraph graph = CommGraph::path(4);
      auto s = random_swarm<SO3d>(rng, 4);
      const Eigen::Vector3d common = oracle::gaussian<SO3d>(rng);
      for (auto& e : s.eta) e = common;
      const auto rates = tc_left_cascade_rhs(s.g, s.eta, graph, 0.0);
      for (const auto& r : rates.aux_rate) CHECK(r.isZero(0.0));
      double expect = 0;
      for (int k = 0; k < 4; ++k) expect -= 2 * (rates.velocity[k] - s.eta[k]).squaredNorm();
      const double h = 1e-6;
      std::vector<SO3d> plus, minus;
      for (int k = 0; k < 4; ++k) {
        plus.push_back(s.g[k] * SO3d::exp(h * rates.velocity[k]));
        minus.push_back(s.g[k] * SO3d::exp(-h * rates.velocity[k]));
      }
      const double fd = (v_tl(plus, s.eta, graph) - v_tl(minus, s.eta, graph)) / (2 * h);
      CHECK(fd == doctest::Approx(expect).epsilon(1e-5).scale(1.0));
    });
  }

  TEST_CASE("tc_left rejects infeasible aux under underactuation") {
    ControlSetting<SO3d> cs;
    cs.drift = Eigen::Vector3d::UnitX();
    cs.actuation = Eigen::Vector3d::UnitY();
    const std::vector<SO3d> g(2);
    TangentVector<SO3d> eta{Eigen::Vector3d(1, 0.5, 0), Eigen::Vector3d(1, 0, 0.3)};
    CHECK_THROWS_AS(tc_left_cascade_rhs(g, eta, CommGraph::complete(2), 0.0, cs), UsageError);
    eta[1] = Eigen::Vector3d(1, -2, 0);
    const auto rates = tc_left_cascade_rhs(g, eta, CommGraph::complete(2), 0.0, cs);
    for (const auto& v : rates.velocity) CHECK(cs.distance(v) < 1e-12);
  }

  TEST_CASE("control setting validation and projection") {
    ControlSetting<SE2d> cs = se2_steering_setting<double>();
    CHECK_NOTHROW(cs.validate());
    CHECK((cs.project(Eigen::Vector3d(3, 4, 5)) - Eigen::Vector3d(1, 0, 5)).norm() == 0.0);
    CHECK(cs.distance(Eigen::Vector3d(1, 0, 7)) == 0.0);
    Eigen::Matrix<double, 3, Eigen::Dynamic> bad(3, 1);
    bad << 0, 0, 2;
    CHECK_THROWS_AS(ControlSetting<SE2d>::make(Eigen::Vector3d(1, 0, 0), bad), UsageError);
  }

  TEST_CASE("SE3 steering: feedback and velocity match the closed forms") {
    const auto cs = se3_steering_setting<double>();
    oracle::for_samples(6, 100, [&](auto& rng, int) {
      const Vector6<double> eta = oracle::gaussian<SE3d>(rng);
      const Eigen::Vector3d ev = eta.head<3>(), ew = eta.tail<3>();
      CHECK((underactuated_feedback<SE3d>(eta, cs) - ev.cross(Eigen::Vector3d::UnitX())).norm() < 1e-12);
      const Eigen::Vector3d u = se3_steering_control(eta);
      CHECK((u - (ew + Eigen::Vector3d::UnitX().cross(ev))).norm() < 1e-15);
      const auto rates = underactuated_lic_rhs<SE3d>({SE3d::identity()}, {eta}, CommGraph::empty(1), 0.0, cs);
      Vector6<double> expect;
      expect << Eigen::Vector3d::UnitX(), u;
      CHECK((rates.velocity[0] - expect).norm() < 1e-12);
    });
  }

  TEST_CASE("underactuated LIC: V_k rate is the sign condition minus |f|^2") {
    auto check = [](auto tag, ControlSetting<decltype(tag)> cs) {
      using G = decltype(tag);
      oracle::for_samples(7, 30, [&](auto& rng, int) {
        auto s = random_swarm<G>(rng, 3);
        align_right(s, oracle::gaussian<G>(rng));
        const auto rates = underactuated_lic_rhs(s.g, s.eta, CommGraph::complete(3), 0.0, cs);
        for (int k = 0; k < 3; ++k) {
          CHECK(cs.distance(rates.velocity[k]) < 1e-12);
          const double h = 1e-6;
          const double fd = (feasibility_cost<G>(s.eta[k] + h * rates.aux_rate[k], cs) -
                             feasibility_cost<G>(s.eta[k] - h * rates.aux_rate[k], cs)) /
                            (2 * h);
          const double expect = rates.sign_condition[k] - underactuated_feedback<G>(s.eta[k], cs).squaredNorm();
          CHECK(fd == doctest::Approx(expect).epsilon(1e-5).scale(1.0));
        }
      });
    };
    check(SE2d{}, se2_steering_setting<double>());
    check(SE3d{}, se3_steering_setting<double>());
    ControlSetting<SE3d> other;
    other.drift << 0.3, 0, 1, 0, 0.5, 0;
    other.actuation = Eigen::Matrix<double, 6, Eigen::Dynamic>::Zero(6, 2);
    other.actuation(1, 0) = 1;
    other.actuation(3, 1) = 1;
    check(SE3d{}, other);
  }

  TEST_CASE("sign condition checker") {
    CHECK(check_theorem3_assumption(se3_steering_setting<double>(), 2000, 1).verdict == SignVerdict::kEquality);
    CHECK(check_theorem3_assumption(se2_steering_setting<double>(), 2000, 2).verdict == SignVerdict::kEquality);
    CHECK(check_theorem3_assumption(ControlSetting<SE3d>::fully_actuated(), 500, 3).verdict ==
          SignVerdict::kEquality);
    // A generic SE(3) setting breaks the equality.
    std::mt19937_64 rng(4);
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Random();
    Eigen::HouseholderQR<Eigen::Matrix<double, 6, 6>> qr(m);
    ControlSetting<SE3d> cs;
    cs.actuation = Eigen::Matrix<double, 6, 6>(qr.householderQ()).leftCols(2);
    cs.drift = oracle::gaussian<SE3d>(rng);
    const auto result = check_theorem3_assumption(cs, 2000, 5);
    CHECK(result.verdict != SignVerdict::kEquality);
    REQUIRE(result.witness);
    CHECK(sign_condition<SE3d>(*result.witness, cs) > 0.0);
  }

  TEST_CASE("compatibility of coincident agents") {
    const std::vector<SE2d> g(3, SE2d({1, 2}, 0.3));
    for (auto mode : {CompatibilityMode::kLic, CompatibilityMode::kTc}) {
      const auto pairs = compatibility_check(g, se2_steering_setting<double>(), mode);
      CHECK(pairs.size() == 3);
      for (const auto& p : pairs) CHECK(p.compatible);
    }
  }

  TEST_CASE("controller objects: transport keeps the transported quantity fixed") {
    std::mt19937_64 rng(8);
    const SE3d a = SE3d::random(rng, 2.0), b = SE3d::random(rng, 2.0);
    const VectorX<double> eta = oracle::gaussian<SE3d>(rng);
    const LicConsensus<SE3d> lic;
    CHECK((adjoint(b, Vector6<double>(lic.transport(a, b, eta))) - adjoint(a, Vector6<double>(eta))).norm() < 1e-12);

    const Se3SteeringHelical<> helical;
    VectorX<double> triple(9);
    for (int i = 0; i < 9; ++i) triple(i) = std::normal_distribution<double>(0, 1)(rng);
    const auto moved = Se3SteeringHelical<>::unpack_triple(helical.transport(a, b, triple));
    const auto orig = Se3SteeringHelical<>::unpack_triple(triple);
    CHECK((b.rotation() * moved.alpha - a.rotation() * orig.alpha).norm() < 1e-12);
    CHECK((b.rotation() * moved.gamma - a.rotation() * orig.gamma).norm() < 1e-12);
    CHECK((b.rotation() * moved.beta + b.translation() - a.rotation() * orig.beta - a.translation()).norm() < 1e-12);
  }

  TEST_CASE("helical consensus is plain consensus on the spatial triple") {
    std::mt19937_64 rng(9);
    const Se3SteeringHelical<> controller;
    const CommGraph graph = CommGraph::directed_chain(4);
    std::vector<SE3d> g;
    std::vector<VectorX<double>> aux;
    for (int k = 0; k < 4; ++k) g.push_back(SE3d::random(rng, 2.0));
    for (int k = 0; k < 4; ++k) aux.push_back(controller.sample_aux(rng, 1.0));
    const auto eval = controller.evaluate(g, aux, graph, 0.0);
    auto spatial = [&](int k) {
      const auto h = Se3SteeringHelical<>::unpack_triple(aux[k]);
      return std::array<Eigen::Vector3d, 3>{g[k].rotation() * h.alpha, g[k].rotation() * h.beta + g[k].translation(),
                                            g[k].rotation() * h.gamma};
    };
    for (int k = 0; k < 4; ++k) {
      const auto c = Se3SteeringHelical<>::unpack_triple(eval.consensus_rate[k]);
      std::array<Eigen::Vector3d, 3> expect{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
      for (int j : graph.in_neighbors(k, 0.0))
        for (int i = 0; i < 3; ++i) expect[i] += spatial(j)[i] - spatial(k)[i];
      CHECK((g[k].rotation() * c.alpha - expect[0]).norm() < 1e-12);
      CHECK((g[k].rotation() * c.beta - expect[1]).norm() < 1e-12);
      CHECK((g[k].rotation() * c.gamma - expect[2]).norm() < 1e-12);
      // The commanded velocity is feasible and steers with e1.
      CHECK(controller.setting().distance(eval.velocity[k]) < 1e-12);
    }
  }

  TEST_CASE("linear steering without normalization equals underactuated LIC with eta_w = 0") {
    std::mt19937_64 rng(10);
    const Se3SteeringLinear<> linear(false);
    const UnderactuatedLic<SE3d> general(se3_steering_setting<double>());
    const CommGraph graph = CommGraph::ring(4);
    std::vector<SE3d> g;
    std::vector<VectorX<double>> aux3, aux6;
    for (int k = 0; k < 4; ++k) g.push_back(SE3d::random(rng, 2.0));
    for (int k = 0; k < 4; ++k) {
      aux3.push_back(linear.sample_aux(rng, 1.0));
      VectorX<double> full = VectorX<double>::Zero(6);
      full.head(3) = aux3.back();
      aux6.push_back(full);
    }
    const auto a = linear.evaluate(g, aux3, graph, 0.0);
    const auto b = general.evaluate(g, aux6, graph, 0.0);
    for (int k = 0; k < 4; ++k) {
      CHECK((a.velocity[k] - b.velocity[k]).norm() < 1e-12);
      CHECK((a.aux_rate[k] - b.aux_rate[k].head(3)).norm() < 1e-12);
      CHECK(b.aux_rate[k].tail(3).norm() < 1e-12);
    }
  }

  TEST_CASE("consensus part plus transport term equals the full rate") {
    std::mt19937_64 rng(11);
    const CommGraph graph = CommGraph::complete(3);
    std::vector<SO3d> g;
    std::vector<VectorX<double>> aux;
    for (int k = 0; k < 3; ++k) g.push_back(SO3d::random(rng));
    for (int k = 0; k < 3; ++k) aux.push_back(oracle::gaussian<SO3d>(rng));
    const TcRightCascade<SO3d> controller;
    const auto e = controller.evaluate(g, aux, graph, 0.0);
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d transport = -e.velocity[k].cross(Eigen::Vector3d(aux[k]));
      CHECK((e.consensus_rate[k] + transport - e.aux_rate[k]).norm() < 1e-12);
    }
  }

  TEST_CASE("size mismatches are usage errors") {
    const std::vector<SO3d> g(3);
    const TangentVector<SO3d> eta(2, Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(lic_consensus_rhs(g, eta, CommGraph::complete(3), 0.0), UsageError);
    const TangentVector<SO3d> eta3(3, Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(lic_consensus_rhs(g, eta3, CommGraph::complete(4), 0.0), UsageError);
  }
}
