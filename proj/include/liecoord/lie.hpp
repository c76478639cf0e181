#pragma once

#include <concepts>
#include <random>
#include <string_view>

#include "liecoord/common.hpp"

namespace liecoord {

/// Compile-time group descriptor: every concrete group (SO3, SE2, SE3) models this.
template <typename G>
concept LieGroup = requires(const G& g, const typename G::Tangent& xi, std::mt19937_64& rng) {
  typename G::Scalar;
  typename G::Tangent;
  typename G::AdjointMatrix;
  typename G::MatrixType;
  { G::kDof } -> std::convertible_to<int>;
  { G::kName } -> std::convertible_to<std::string_view>;
  { G::identity() } -> std::same_as<G>;
  { g * g } -> std::same_as<G>;
  { g.inverse() } -> std::same_as<G>;
  { g.Ad() } -> std::same_as<typename G::AdjointMatrix>;
  { G::ad(xi) } -> std::same_as<typename G::AdjointMatrix>;
  { G::bracket(xi, xi) } -> std::same_as<typename G::Tangent>;
  { G::exp(xi) } -> std::same_as<G>;
  { g.matrix() } -> std::same_as<typename G::MatrixType>;
  { g.reprojected() } -> std::same_as<G>;
  { g.manifold_error() } -> std::convertible_to<typename G::Scalar>;
  { G::random(rng) } -> std::same_as<G>;
};

template <LieGroup G>
G compose(const G& g, const G& h) {
  return g * h;
}

template <LieGroup G>
G inverse(const G& g) {
  return g.inverse();
}

/// lambda_jk = g_k^-1 g_j, invariant under common left translation.
template <LieGroup G>
G left_relative(const G& g_k, const G& g_j) {
  return g_k.inverse() * g_j;
}

/// rho_jk = g_j g_k^-1, invariant under common right translation.
template <LieGroup G>
G right_relative(const G& g_k, const G& g_j) {
  return g_j * g_k.inverse();
}

template <LieGroup G>
typename G::Tangent adjoint(const G& g, const typename G::Tangent& xi) {
  return g.Ad() * xi;
}

/// Matrix of [xi, .] in algebra coordinates.
template <LieGroup G>
typename G::AdjointMatrix ad_matrix(const typename G::Tangent& xi) {
  return G::ad(xi);
}

template <LieGroup G>
typename G::Tangent bracket(const typename G::Tangent& xi, const typename G::Tangent& eta) {
  return G::bracket(xi, eta);
}

/**
 * Dual pairing <xi, eta> = ad_xi^T eta.
 *
 * It is the unique bilinear map with
 *   x1 . <x2, x3> + [x1, x2] . x3 = 0
 * under the Euclidean product in the fixed algebra basis.
 */
template <LieGroup G>
typename G::Tangent pairing(const typename G::Tangent& xi, const typename G::Tangent& eta) {
  return G::ad(xi).transpose() * eta;
}

template <LieGroup G>
G exp(const typename G::Tangent& xi) {
  return G::exp(xi);
}

/**
 * Monte-Carlo test for a unitary adjoint representation: true iff
 * |Ad_g xi| == |xi| within 1e-9 (relative) for every sampled pair.
 */
template <LieGroup G>
bool is_unitary_adjoint(int samples, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const G g = G::random(rng, typename G::Scalar(2));
    typename G::Tangent xi;
    for (int i = 0; i < G::kDof; ++i) xi(i) = typename G::Scalar(normal(rng));
    const auto n0 = xi.norm();
    const auto n1 = adjoint(g, xi).norm();
    if (std::abs(static_cast<double>(n1 - n0)) > 1e-9 * (1.0 + static_cast<double>(n0))) {
      return false;
    }
  }
  return true;
}

/// Gaussian algebra vector with standard deviation `scale` per coordinate.
template <LieGroup G, typename Rng>
typename G::Tangent random_tangent(Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  typename G::Tangent xi;
  for (int i = 0; i < G::kDof; ++i) xi(i) = typename G::Scalar(normal(rng));
  return xi;
}

/// Frobenius distance between homogeneous representations.
template <LieGroup G>
typename G::Scalar distance(const G& a, const G& b) {
  return (a.matrix() - b.matrix()).norm();
}

}  // namespace liecoord
