#pragma once

#include "enskog/types.hpp"

#include <utility>

namespace enskog {

/// Elastic reflection of a velocity pair along the unit impact direction
/// omega:
///   v'  = v  - omega [omega . (v - v1)]
///   v1' = v1 + omega [omega . (v - v1)]
/// Preserves momentum and kinetic energy and is an involution.
std::pair<Vec3, Vec3> elastic_reflect(const Vec3& v, const Vec3& v1,
                                      const Vec3& omega);

/// Incoming-hemisphere test: (v - v1) . omega >= 0 (boundary included).
bool is_incoming(const Vec3& v, const Vec3& v1, const Vec3& omega);

/// Unit vector from the center of the first sphere to the center of the
/// second.
Vec3 contact_normal(const Vec3& x_first, const Vec3& x_second);

}  // namespace enskog
