#include <doctest.h>

#include "liecoord/groups.hpp"
#include "oracles.hpp"

using namespace liecoord;

namespace {

constexpr int kSamples = 1000;

template <typename G>
void algebraic_identities(std::uint64_t seed) {
  oracle::for_samples(seed, kSamples, [](auto& rng, int) {
    const G g = G::random(rng, 2.0), h = G::random(rng, 2.0);
    const auto x1 = oracle::gaussian<G>(rng), x2 = oracle::gaussian<G>(rng), x3 = oracle::gaussian<G>(rng);
    const double scale = 1 + x1.norm() * x2.norm() * x3.norm();

    // Ad is a homomorphism.
    CHECK((adjoint(compose(g, h), x1) - adjoint(g, adjoint(h, x1))).norm() < 1e-10 * (1 + x1.norm()));
    // Ad preserves the bracket.
    const auto lhs = adjoint(g, bracket<G>(x1, x2));
    const auto rhs = bracket<G>(adjoint(g, x1), adjoint(g, x2));
    CHECK((lhs - rhs).norm() < 1e-10 * (1 + rhs.norm()));
    // Jacobi identity.
    const typename G::Tangent jacobi = bracket<G>(x1, bracket<G>(x2, x3)) + bracket<G>(x2, bracket<G>(x3, x1)) +
                        bracket<G>(x3, bracket<G>(x1, x2));
    CHECK(jacobi.norm() < 1e-12 * scale);
    // Antisymmetry.
    CHECK((bracket<G>(x1, x2) + bracket<G>(x2, x1)).norm() == 0.0);
    // Defining relation of the pairing.
    CHECK(std::abs(x1.dot(pairing<G>(x2, x3)) + bracket<G>(x1, x2).dot(x3)) < 1e-12 * scale);
    // Flow property.
    CHECK(distance(G::exp(x1) * G::exp(x1), G::exp(2.0 * x1)) < 1e-10 * (1 + x1.norm()));
    const double s = 0.3, t = -1.1;
    CHECK(distance(G::exp(s * x1) * G::exp(t * x1), G::exp((s + t) * x1)) < 1e-10 * (1 + x1.norm()));
  });
}

/// d/dt Ad_{g(t)^-1} eta = -[xi, Ad_{g(t)^-1} eta] for g(t) = g0 exp(t xi).
template <typename G>
void inverse_adjoint_derivative(std::uint64_t seed) {
  oracle::for_samples(seed, 50, [](auto& rng, int) {
    const G g0 = G::random(rng, 2.0);
    const auto xi = oracle::gaussian<G>(rng), eta = oracle::gaussian<G>(rng);
    const double h = 1e-5;
    auto f = [&](double t) { return adjoint((g0 * G::exp(t * xi)).inverse(), eta); };
    const typename G::Tangent fd = (f(h) - f(-h)) / (2 * h);
    const typename G::Tangent expect = -bracket<G>(xi, f(0.0));
    CHECK((fd - expect).norm() < 1e-6 * (1 + expect.norm()));
  });
}

/// Right velocity of g(t) = g0 exp(t xi) is Ad_{g(t)} xi.
template <typename G>
void right_velocity_relation(std::uint64_t seed) {
  oracle::for_samples(seed, 50, [](auto& rng, int) {
    const G g0 = G::random(rng, 2.0);
    const auto xi = oracle::gaussian<G>(rng);
    for (double h : {1e-3, 1e-4}) {
      // (g(t+h) g(t)^-1 - I) / h approximates the right velocity matrix to O(h).
      const Eigen::MatrixXd step = (g0 * G::exp(h * xi) * g0.inverse()).matrix();
      const Eigen::MatrixXd fd = (step - Eigen::MatrixXd::Identity(step.rows(), step.cols())) / h;
      const auto xi_r = adjoint(g0, xi);
      CHECK((oracle::algebra_vector<G>(fd) - xi_r).norm() < 2 * h * (1 + xi_r.squaredNorm()));
    }
  });
}

/// [xi, eta] = 0 implies exp(t eta) fixes xi under Ad.
template <typename G>
void isotropy_exp_consistency(std::uint64_t seed) {
  oracle::for_samples(seed, 100, [](auto& rng, int) {
    const auto xi = oracle::gaussian<G>(rng);
    // eta in ker ad_xi: a multiple of xi always works; for SE(3) add the pure
    // translation along the rotation axis, which also commutes.
    typename G::Tangent eta = 0.7 * xi;
    if constexpr (std::is_same_v<G, SE3d>) {
      Vector6<double> axis = Vector6<double>::Zero();
      axis.head<3>() = xi.template tail<3>();
      eta += 1.3 * axis;
    }
    REQUIRE(bracket<G>(xi, eta).norm() < 1e-12);
    for (double t : {0.1, 1.0, 3.7}) {
      CHECK((adjoint(G::exp(t * eta), xi) - xi).norm() < 1e-10 * (1 + xi.norm()));
    }
  });
}

}  // namespace

TEST_SUITE("lie_properties") {
  TEST_CASE("algebraic identities on SO3") { algebraic_identities<SO3d>(100); }
  TEST_CASE("algebraic identities on SE2") { algebraic_identities<SE2d>(101); }
  TEST_CASE("algebraic identities on SE3") { algebraic_identities<SE3d>(102); }

  TEST_CASE("derivative of the inverse adjoint") {
    inverse_adjoint_derivative<SO3d>(110);
    inverse_adjoint_derivative<SE2d>(111);
    inverse_adjoint_derivative<SE3d>(112);
  }

  TEST_CASE("right velocity equals Ad_g of the left velocity") {
    right_velocity_relation<SO3d>(120);
    right_velocity_relation<SE2d>(121);
    right_velocity_relation<SE3d>(122);
  }

  TEST_CASE("exp of an isotropy direction fixes xi") {
    isotropy_exp_consistency<SO3d>(130);
    isotropy_exp_consistency<SE2d>(131);
    isotropy_exp_consistency<SE3d>(132);
  }

  TEST_CASE("random group elements satisfy the manifold constraint") {
    oracle::for_samples(140, 200, [](auto& rng, int) {
      CHECK(SO3d::random(rng).manifold_error() < kManifoldTolerance);
      CHECK(SE3d::random(rng, 5.0).manifold_error() < kManifoldTolerance);
      CHECK(SO3d::random(rng).rotation().determinant() == doctest::Approx(1.0));
    });
  }

  TEST_CASE("random sampling is deterministic per seed") {
    std::mt19937_64 a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(distance(SE3d::random(a, 2.0), SE3d::random(b, 2.0)) == 0.0);
  }
}
