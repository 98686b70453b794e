#pragma once

#include "enskog/flows.hpp"
#include "enskog/test_function.hpp"
#include "enskog/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace enskog {

/// Regular initial density f0 on the single-particle phase space. density is
/// mass-inclusive; the samplers and marginals refer to the normalized law
/// f0 / mass, which factorizes into position x velocity for the built-ins.
struct DensitySpec {
  std::string name;
  double mass = 1.0;  // L1 norm of f0
  std::function<double(const PhasePoint&)> density;
  std::function<PhasePoint(std::mt19937_64&)> sample;
  std::function<double(const Vec3&)> position_marginal;
  std::function<double(const Vec3&)> velocity_marginal;
  std::function<Vec3(std::mt19937_64&)> sample_velocity;
};

namespace densities {

/// Centered isotropic Gaussians: positions N(0, sx^2 I), velocities
/// N(0, sv^2 I).
DensitySpec gaussian(double position_width, double velocity_width,
                     double mass = 1.0);

/// Uniform on [-L, L]^3 in position, Maxwellian N(0, sv^2 I) in velocity.
DensitySpec box_maxwellian(double half_width, double velocity_width,
                           double mass = 1.0);

}  // namespace densities

/// Radius a^2 / (8 norm_f0) below which the expansion converges for all t.
double convergence_radius(double a, double norm_f0);

/// Geometric majorant (8 lambda / a^2)^n norm_f0^(n+1) of the order-n term
/// mass (observables bounded by 1).
double term_norm_bound(int n, double lambda, double a, double norm_f0);

/// Estimator parameterization: initial_tuples samples zeta(0) from
/// f0^(n+1) and filters by the forward flow; node_variables samples the
/// backward-flow variables (root state, creation times, impact directions,
/// partner velocities) and weighs by the flow Jacobian.
enum class McMode { initial_tuples, node_variables };

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;  // per expansion term
  std::vector<double> by_n;
  std::vector<double> std_error_by_n;
  std::uint64_t seed = 0;
  McMode mode = McMode::initial_tuples;
  bool beyond_radius = false;  // lambda above half the convergence radius
};

/// Monte Carlo estimate of the observable phi integrated against the series
/// solution at time t, summed over orders <= n_max. Deterministic for fixed
/// (inputs, seed): every term owns a seeded substream and sums are pairwise
/// in fixed order.
MCEstimate weak_mc_estimate(const DensitySpec& f0, const TestFunction& phi,
                            double t, double lambda, double a, int n_max,
                            std::uint64_t samples, std::uint64_t seed,
                            McMode mode = McMode::initial_tuples);

struct DecayReport {
  std::vector<double> mass;       // per-n absolute-value term estimate
  std::vector<double> std_error;  // per-n standard error
  std::vector<double> bound;      // term_norm_bound per n
  bool pass = false;
  int violated_n = -1;
};

/// Checks the per-order term masses against the geometric majorant, allowing
/// 3 standard errors of slack. phi should be bounded by 1.
DecayReport verify_geometric_decay(const DensitySpec& f0,
                                   const TestFunction& phi, double t,
                                   double lambda, double a, int n_max,
                                   std::uint64_t samples, std::uint64_t seed);

/// Density sampled at midpoints of a uniform grid over a box in phase space.
/// Cell (ix, iy, iz, jx, jy, jz) is stored row-major with the position index
/// outermost.
struct GridDensity {
  Vec3 x_lo{Vec3::Zero()}, x_hi{Vec3::Zero()};
  Vec3 v_lo{Vec3::Zero()}, v_hi{Vec3::Zero()};
  std::array<int, 3> nx{1, 1, 1}, nv{1, 1, 1};
  std::vector<double> values;

  [[nodiscard]] std::size_t cell_count() const;
  [[nodiscard]] Vec3 x_step() const;
  [[nodiscard]] Vec3 v_step() const;
  /// Fills values from f at the cell midpoints.
  void fill(const std::function<double(const PhasePoint&)>& f);
};

/// Free-energy diagnostic: integral of f ln f plus (lambda/2) times the
/// spatial pair integral of rho(x) rho(y) over |x - y| < a, by midpoint
/// quadrature with 0 ln 0 = 0. Throws RefinementFailureError when the
/// spatial grid is coarser than a/2.
double h_functional(const GridDensity& f, double lambda, double a);

}  // namespace enskog
