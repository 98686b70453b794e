#pragma once

#include "enskog/flows.hpp"
#include "enskog/hardsphere.hpp"
#include "enskog/test_function.hpp"
#include "enskog/trees.hpp"
#include "enskog/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace enskog {

/// Uniform atomic measure (1/N) sum_i delta_{z_i} on the physical phase space
/// of spheres of the given diameter.
struct EmpiricalMeasure {
  std::vector<PhasePoint> atoms;
  double diameter = 1.0;

  [[nodiscard]] int size() const { return static_cast<int>(atoms.size()); }
};

EmpiricalMeasure measure_of(const HardSphereConfig& config);

/// Pairwise separation >= diameter (up to tolerance); throws
/// InvalidConfigurationError otherwise.
void require_physical(const EmpiricalMeasure& mu);

struct TermRecord {
  int n = 0;
  std::vector<int> k;
  std::vector<int> sigmas;
  std::uint64_t tuple_count = 0;  // support tuples passing the membership test
  double value = 0.0;
};

struct SeriesReport {
  std::vector<TermRecord> terms;    // lexicographic in (n, k, sigma)
  std::vector<double> totals_by_n;  // index n
  double total = 0.0;
  /// Smallest n such that every term of order >= n vanished (n_max + 1 when
  /// the last computed order was still active).
  int vanishing_from = 0;
  bool truncated = false;  // nonzero contribution at the last computed order
  double reference = 0.0;  // simulator value, where one was computed
  double discrepancy = 0.0;
};

/// One expansion term: sum over ordered (n+1)-tuples of atoms (repetition
/// allowed) realizing the tree with the given signs, each contributing
/// (lambda/a^2)^n prod(sigma) phi(z_1(t)) / N^(n+1). Tuples are pruned
/// depth-first, assigning atoms lazily as contacts require them.
double term_value(const EmpiricalMeasure& mu0, const PartialTree& tree,
                  const SignSequence& signs, double t, const TestFunction& phi,
                  double lambda, std::uint64_t* tuple_count = nullptr);

/// Full expansion of the observable at time t over all realizable trees and
/// sign sequences up to order n_max; lambda defaults to N a^2.
SeriesReport evaluate(const EmpiricalMeasure& mu0, double t,
                      const TestFunction& phi, int n_max,
                      std::optional<double> lambda = std::nullopt);

/// Times 0 = theta_0 < ... < theta_S = t such that each open interval holds
/// at most one collision, no collision sits at a cut, and within a colliding
/// interval deleting either collision partner leaves the other N-1 particles
/// collision-free.
std::vector<double> partition_times(const HardSphereConfig& z0, double t);

/// Chains the expansion across the partition intervals, feeding each
/// interval's evolved atoms (from the simulator) into the next, and compares
/// every interval total with the simulator average at the interval end.
SeriesReport verify_microscopic(const HardSphereConfig& z0, double t,
                                const TestFunction& phi,
                                std::optional<double> lambda = std::nullopt,
                                int n_max = 6);

/// Expansion value over [0, t]. Uses the single-window expansion when it
/// terminates by n_max; otherwise composes over a collision-isolating
/// partition (where termination is guaranteed) and reports chained = true.
/// A window holding several collisions can carry nonzero contracted terms at
/// arbitrarily high order, so the single-window sum need not terminate.
double expansion_value(const HardSphereConfig& z0, double t,
                       const TestFunction& phi,
                       std::optional<double> lambda = std::nullopt,
                       int n_max = 6, bool* chained = nullptr);

struct SemigroupReport {
  double direct = 0.0;     // expansion over [0, t]
  double composed = 0.0;   // expansion over [0, tau], then over [tau, t]
  double simulator = 0.0;  // (1/N) sum phi(z_i(t))
  double stage_discrepancy = 0.0;  // [0, tau] stage vs simulator at tau
  double max_discrepancy = 0.0;
  bool chained = false;  // some stage fell back to partition composition
  bool pass = false;
};

/// Three-way check of composability over consecutive intervals.
SemigroupReport verify_semigroup(const HardSphereConfig& z0, double tau,
                                 double t, const TestFunction& phi,
                                 int n_max = 6);

struct RepresentationReport {
  std::vector<double> contracted_by_n;   // repeated-atom expansion terms
  std::vector<double> interacting_by_n;  // distinct-atom interacting flow
  double contracted_total = 0.0;
  double interacting_total = 0.0;
  double simulator = 0.0;
  double difference = 0.0;
  bool contracted_chained = false;  // contracted side needed composition
};

/// Contracted expansion (ordered tuples with repetition, transparent
/// non-designated contacts) against the interacting-flow form (ordered tuples
/// of distinct atoms, genuine recollisions), order by order.
RepresentationReport compare_representations(const HardSphereConfig& z0,
                                             double t, const TestFunction& phi,
                                             int n_max = 6);

/// One interacting-flow term: ordered tuples of distinct atoms, weight
/// (lambda/a^2)^n prod(sigma) phi(z_1(t)) / N^(n+1) per realizing tuple.
double interacting_term_value(const EmpiricalMeasure& mu0, const FullTree& tree,
                              const SignSequence& signs, double t,
                              const TestFunction& phi, double lambda,
                              std::uint64_t* tuple_count = nullptr);

}  // namespace enskog
