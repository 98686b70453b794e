#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace enskog {

using Vec3 = Eigen::Vector3d;

/// A point z = (x, v) of the single-particle phase space R^6.
struct PhasePoint {
  Vec3 x{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};

  PhasePoint() = default;
  PhasePoint(const Vec3& x_, const Vec3& v_) : x(x_), v(v_) {}

  /// Free streaming over a (possibly negative) time span.
  [[nodiscard]] PhasePoint streamed(double dt) const { return {x + v * dt, v}; }

  [[nodiscard]] bool isApprox(const PhasePoint& other, double tol) const {
    return (x - other.x).norm() <= tol && (v - other.v).norm() <= tol;
  }
};

// Error hierarchy. Geometry/argument misuse and dynamical pathologies are kept
// distinct so callers can refuse pathological inputs without masking bugs.

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidDirectionError : Error {
  using Error::Error;
};

struct DegenerateGeometryError : Error {
  using Error::Error;
};

struct InvalidConfigurationError : Error {
  using Error::Error;
};

struct InvalidArgumentError : Error {
  using Error::Error;
};

struct InvalidTreeError : Error {
  using Error::Error;
};

struct InvalidNodesError : Error {
  using Error::Error;
};

struct CapExceededError : Error {
  using Error::Error;
};

struct RefinementFailureError : Error {
  using Error::Error;
};

/// Measure-zero events the formalism assumes away. Detected and refused,
/// never resolved.
struct PathologyError : Error {
  using Error::Error;
};

struct GrazingPathology : PathologyError {
  using PathologyError::PathologyError;
};

struct SimultaneousCollisionPathology : PathologyError {
  using PathologyError::PathologyError;
};

struct BoundaryPathology : PathologyError {
  using PathologyError::PathologyError;
};

struct EventCascadeError : PathologyError {
  using PathologyError::PathologyError;
};

// Shared tolerances.
inline constexpr double kUnitTol = 1e-9;       // unit-vector input check
inline constexpr double kGrazeTol = 1e-9;      // relative normal velocity
inline constexpr double kSimultaneousTol = 1e-9;  // event-time separation

}  // namespace enskog
