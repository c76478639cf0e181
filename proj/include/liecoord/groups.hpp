#pragma once

#include <string_view>

#include "liecoord/lie.hpp"
#include "liecoord/se2.hpp"
#include "liecoord/se3.hpp"
#include "liecoord/so3.hpp"

namespace liecoord {

static_assert(LieGroup<SO3d>);
static_assert(LieGroup<SE2d>);
static_assert(LieGroup<SE3d>);

template <LieGroup G>
G reproject(const G& g) {
  return g.reprojected();
}

/// Calls fn.template operator()<G>() for the double-precision group named `name`.
template <typename Fn>
decltype(auto) dispatch_group(std::string_view name, Fn&& fn) {
  if (name == SO3d::kName) return fn.template operator()<SO3d>();
  if (name == SE2d::kName) return fn.template operator()<SE2d>();
  if (name == SE3d::kName) return fn.template operator()<SE3d>();
  throw UsageError("unknown group '" + std::string(name) + "' (valid: SO3, SE2, SE3)");
}

}  // namespace liecoord
