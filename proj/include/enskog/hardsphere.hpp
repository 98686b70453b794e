#pragma once

#include "enskog/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace enskog {

/// State of N labeled hard spheres of common diameter `a`.
struct HardSphereConfig {
  std::vector<PhasePoint> particles;  // particle label = index + 1
  double diameter = 1.0;
  double clock = 0.0;

  [[nodiscard]] int size() const { return static_cast<int>(particles.size()); }
};

struct CollisionEvent {
  int i = 0;  // labels, i < j
  int j = 0;
  double time = 0.0;  // absolute
  Vec3 normal{Vec3::Zero()};  // from center of i to center of j at contact
};

struct Trajectory {
  HardSphereConfig initial;
  std::vector<CollisionEvent> events;
  double horizon = 0.0;  // absolute end time
};

inline constexpr std::uint64_t kMaxEventsPerAdvance = 1000000;

/// First s > 0 at which two freely streaming spheres reach center distance a
/// while approaching; nullopt if they never do. Throws
/// InvalidConfigurationError on overlapping input.
std::optional<double> time_to_contact(const PhasePoint& zi,
                                      const PhasePoint& zj, double a);

/// Root of |dx + s dv|^2 = a^2 reached while approaching, with no overlap
/// precondition; used by the Boltzmann-Enskog flows where overlap is allowed.
std::optional<double> free_contact_root(const Vec3& dx, const Vec3& dv,
                                        double a);

struct AdvanceResult {
  HardSphereConfig config;
  Trajectory trajectory;
};

/// Event-driven hard-sphere flow T_N over a duration t: free streaming plus
/// pairwise elastic reflection at center distance a. Simultaneous distinct
/// events, grazing contacts and event cascades are refused as pathologies.
AdvanceResult advance(const HardSphereConfig& config, double t);

/// Velocity reversal: same positions, negated velocities.
HardSphereConfig reverse(const HardSphereConfig& config);

/// Configuration along a recorded trajectory at absolute time s in
/// [initial.clock, horizon].
HardSphereConfig state_at(const Trajectory& traj, double s);

struct MarginalAtom {
  double weight = 0.0;
  std::vector<PhasePoint> states;  // ordered j-tuple
};

/// Support atoms of the j-particle marginal at absolute time s: all ordered
/// j-tuples of distinct particle states, each of weight
/// 1 / (N (N-1) ... (N-j+1)).
std::vector<MarginalAtom> marginal_support(const Trajectory& traj, double s,
                                           int j);

/// Pairwise non-overlap check (distance >= a (1 - 1e-9)); throws
/// InvalidConfigurationError when violated.
void require_physical(const HardSphereConfig& config);

}  // namespace enskog
