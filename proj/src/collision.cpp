#include "enskog/collision.hpp"

#include <cmath>

namespace enskog {

namespace {

void require_unit(const Vec3& omega) {
  if (std::abs(omega.norm() - 1.0) > kUnitTol) {
    throw InvalidDirectionError("impact direction is not a unit vector (norm " +
                                std::to_string(omega.norm()) + ")");
  }
}

}  // namespace

std::pair<Vec3, Vec3> elastic_reflect(const Vec3& v, const Vec3& v1,
                                      const Vec3& omega) {
  require_unit(omega);
  const double proj = omega.dot(v - v1);
  return {v - proj * omega, v1 + proj * omega};
}

bool is_incoming(const Vec3& v, const Vec3& v1, const Vec3& omega) {
  require_unit(omega);
  return (v - v1).dot(omega) >= 0.0;
}

Vec3 contact_normal(const Vec3& x_first, const Vec3& x_second) {
  const Vec3 d = x_second - x_first;
  const double len = d.norm();
  if (len <= 0.0) {
    throw DegenerateGeometryError("coincident sphere centers");
  }
  return d / len;
}

}  // namespace enskog
