#pragma once

#include "enskog/hardsphere.hpp"
#include "enskog/trees.hpp"
#include "enskog/types.hpp"

#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace enskog {

/// Signs sigma_1..sigma_n attached to the tree nodes, each +1 or -1.
struct SignSequence {
  std::vector<int> sigmas;

  [[nodiscard]] int order() const { return static_cast<int>(sigmas.size()); }
};

/// All sign sequences of length n in lexicographic order (+1 before -1).
std::vector<SignSequence> enumerate_signs(int n);

/// Node variables of a tree of order n: creation times t_1..t_n, impact
/// directions omega_1..omega_n and created velocities v_2..v_{n+1}. Index i
/// refers to the creation of particle i+1.
struct NodeVariables {
  std::vector<double> times;
  std::vector<Vec3> omegas;
  std::vector<Vec3> velocities;

  [[nodiscard]] int order() const { return static_cast<int>(times.size()); }
};

struct CreationRecord {
  int label = 0;    // created particle
  int parent = 0;
  double time = 0.0;
  int sigma = +1;
  Vec3 omega{Vec3::Zero()};
  Vec3 parent_velocity_before{Vec3::Zero()};  // eta_parent(t_i + 0)
  Vec3 child_velocity{Vec3::Zero()};          // node variable v_{i+1}
};

/// Result of the backward flow: the n+1 particle configuration zeta(0) and
/// the creation log (in decreasing creation-time order).
struct FlowState {
  std::vector<PhasePoint> particles;  // label = index + 1, states at time 0
  double clock = 0.0;
  std::vector<CreationRecord> log;
};

/// Boltzmann-Enskog backward flow: starting from the root state (x1, v1) at
/// time t, adjoin particle i+1 at its creation time t_i at distance a from
/// its parent (at +a omega unreflected for sigma = -, at -a omega with the
/// precollisional velocity pair for sigma = +) and stream everything freely
/// to time 0.
FlowState backward_flow(const PhasePoint& root, const PartialTree& tree,
                        const SignSequence& signs, const NodeVariables& nodes,
                        double t, double a);

struct ForwardResult {
  PhasePoint z1_final;
  /// Absorption time of particle m at index m - 2, m = 2..n+1.
  std::vector<double> absorption_times;
};

/// Boltzmann-Enskog forward flow: particles stream freely and ignore all
/// contacts except those of designated next-collision partners, where the
/// child is absorbed (parent velocity unchanged for sigma = -, reflected for
/// sigma = +). Returns the surviving particle-1 state at time t, or nullopt
/// when the tuple does not realize the tree within (0, t).
std::optional<ForwardResult> forward_flow(const std::vector<PhasePoint>& zeta0,
                                          const PartialTree& tree,
                                          const SignSequence& signs, double t,
                                          double a);

/// Membership in A^eps: the forward flow succeeds and absorption times of
/// same-parent children are separated by more than epsilon.
bool membership(const std::vector<PhasePoint>& zeta0, const PartialTree& tree,
                const SignSequence& signs, double t, double a, double epsilon);

/// |Jacobian| of the backward map: a^{2n} prod_i |omega_i . (v_{i+1} -
/// eta_parent(t_i + 0))|, read off the backward trace.
double jacobian_weight(const FlowState& trace, double a);

/// Forward flow in which alive particles additionally undergo genuine
/// hard-sphere collisions (recollisions); absorptions follow the fully
/// ordered tree, largest label first, each at the first parent contact after
/// all larger labels are gone. Returns nullopt when some absorption never
/// happens within (0, t).
std::optional<PhasePoint> interacting_forward_flow(
    const std::vector<PhasePoint>& zeta0, const FullTree& tree,
    const SignSequence& signs, double t, double a);

using VelocitySampler = std::function<Vec3(std::mt19937_64&)>;

/// Random admissible node variables for a given tree and sign sequence:
/// same-parent times sorted below the parent's creation time, impact
/// directions uniform on the admissible hemisphere, velocities from the
/// supplied sampler (standard Gaussian by default).
NodeVariables sample_node_variables(const PhasePoint& root,
                                    const PartialTree& tree,
                                    const SignSequence& signs, double t,
                                    double a, std::mt19937_64& rng,
                                    const VelocitySampler& sample_velocity = {});

}  // namespace enskog
