#include "enskog/regular.hpp"

#include "enskog/trees.hpp"

#include <cmath>
#include <numeric>

namespace enskog {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double ipow(double base, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

double gauss3(const Vec3& y, double width) {
  const double s2 = width * width;
  return std::exp(-y.squaredNorm() / (2.0 * s2)) /
         std::pow(kTwoPi * s2, 1.5);
}

Vec3 draw_gauss3(std::mt19937_64& rng, double width) {
  std::normal_distribution<double> normal(0.0, width);
  return Vec3(normal(rng), normal(rng), normal(rng));
}

Vec3 draw_unit_sphere(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double z = 2.0 * unif(rng) - 1.0;
  const double phi = kTwoPi * unif(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(r * std::cos(phi), r * std::sin(phi), z);
}

}  // namespace

namespace densities {

DensitySpec gaussian(double position_width, double velocity_width,
                     double mass) {
  if (position_width <= 0.0 || velocity_width <= 0.0 || mass <= 0.0) {
    throw InvalidArgumentError("gaussian density: widths and mass must be > 0");
  }
  DensitySpec spec;
  spec.name = "gaussian";
  spec.mass = mass;
  spec.position_marginal = [=](const Vec3& x) {
    return gauss3(x, position_width);
  };
  spec.velocity_marginal = [=](const Vec3& v) {
    return gauss3(v, velocity_width);
  };
  spec.density = [=](const PhasePoint& z) {
    return mass * gauss3(z.x, position_width) * gauss3(z.v, velocity_width);
  };
  spec.sample = [=](std::mt19937_64& rng) {
    return PhasePoint{draw_gauss3(rng, position_width),
                      draw_gauss3(rng, velocity_width)};
  };
  spec.sample_velocity = [=](std::mt19937_64& rng) {
    return draw_gauss3(rng, velocity_width);
  };
  return spec;
}

DensitySpec box_maxwellian(double half_width, double velocity_width,
                           double mass) {
  if (half_width <= 0.0 || velocity_width <= 0.0 || mass <= 0.0) {
    throw InvalidArgumentError(
        "box_maxwellian density: widths and mass must be > 0");
  }
  const double volume = ipow(2.0 * half_width, 3);
  DensitySpec spec;
  spec.name = "box-maxwellian";
  spec.mass = mass;
  spec.position_marginal = [=](const Vec3& x) {
    for (int d = 0; d < 3; ++d) {
      if (std::abs(x[d]) > half_width) return 0.0;
    }
    return 1.0 / volume;
  };
  spec.velocity_marginal = [=](const Vec3& v) {
    return gauss3(v, velocity_width);
  };
  spec.density = [=, pos = spec.position_marginal](const PhasePoint& z) {
    return mass * pos(z.x) * gauss3(z.v, velocity_width);
  };
  spec.sample = [=](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-half_width, half_width);
    const Vec3 x(unif(rng), unif(rng), unif(rng));
    return PhasePoint{x, draw_gauss3(rng, velocity_width)};
  };
  spec.sample_velocity = [=](std::mt19937_64& rng) {
    return draw_gauss3(rng, velocity_width);
  };
  return spec;
}

}  // namespace densities

double convergence_radius(double a, double norm_f0) {
  if (a <= 0.0 || norm_f0 <= 0.0) {
    throw InvalidArgumentError("convergence_radius: need a > 0, norm > 0");
  }
  return a * a / (8.0 * norm_f0);
}

double term_norm_bound(int n, double lambda, double a, double norm_f0) {
  if (n < 0) throw InvalidArgumentError("term_norm_bound: n < 0");
  return ipow(8.0 * lambda / (a * a), n) * ipow(norm_f0, n + 1);
}

namespace {

// Sum in a fixed pairwise order, independent of how the values were produced.
double pairwise_sum(const std::vector<double>& v, std::size_t lo,
                    std::size_t hi) {
  if (hi - lo == 0) return 0.0;
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

struct TermStats {
  double mean = 0.0;
  double variance_of_mean = 0.0;
};

TermStats reduce(const std::vector<double>& weights) {
  const std::size_t m = weights.size();
  TermStats st;
  st.mean = pairwise_sum(weights, 0, m) / static_cast<double>(m);
  std::vector<double> sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = weights[i] - st.mean;
    sq[i] = d * d;
  }
  if (m > 1) {
    st.variance_of_mean =
        pairwise_sum(sq, 0, m) / static_cast<double>(m - 1) /
        static_cast<double>(m);
  }
  return st;
}

bool admissible_times(const ParentMap& pm, const std::vector<double>& times,
                      double horizon) {
  const int n = static_cast<int>(times.size());
  auto creation = [&](int label) {
    return label == 1 ? horizon : times[label - 2];
  };
  for (int m = 2; m <= n + 1; ++m) {
    if (!(times[m - 2] < creation(pm.parent_of(m)))) return false;
  }
  for (int p = 1; p <= n + 1; ++p) {
    const auto kids = pm.children_of(p);
    for (std::size_t i = 1; i < kids.size(); ++i) {
      if (!(times[kids[i] - 2] < times[kids[i - 1] - 2])) return false;
    }
  }
  return true;
}

int sign_product(const std::vector<int>& sigmas) {
  int s = 1;
  for (int x : sigmas) s *= x;
  return s;
}

struct McContext {
  const DensitySpec* f0;
  const TestFunction* phi;
  double t, lambda, a;
  bool absolute = false;  // term-mass mode: |phi| and no sign factor
};

// One draw of the zeta(0)-space estimator: an (n+1)-tuple from f0, filtered
// by the forward flow.
double draw_initial_tuples(const McContext& cx, const PartialTree& tree,
                           const SignSequence& signs, std::mt19937_64& rng) {
  const int n = tree.order();
  std::vector<PhasePoint> zeta0(n + 1);
  for (auto& z : zeta0) z = cx.f0->sample(rng);
  std::optional<ForwardResult> res;
  try {
    res = forward_flow(zeta0, tree, signs, cx.t, cx.a);
  } catch (const PathologyError&) {
    return 0.0;  // measure-zero contact pathologies
  }
  if (!res) return 0.0;
  const double base = ipow(cx.f0->mass, n + 1) *
                      ipow(cx.lambda / (cx.a * cx.a), n) *
                      (*cx.phi)(res->z1_final);
  return cx.absolute ? std::abs(base)
                     : sign_product(signs.sigmas) * base;
}

// One draw of the node-variable estimator: root state, creation times,
// impact directions and partner velocities, weighed by the backward-flow
// Jacobian and the f0 values at the transported initial states.
double draw_node_variables(const McContext& cx, const PartialTree& tree,
                           const ParentMap& pm, const SignSequence& signs,
                           std::mt19937_64& rng) {
  const int n = tree.order();
  const PhasePoint seed_point = cx.f0->sample(rng);
  const Vec3 xi = seed_point.x;
  const Vec3 v1 = seed_point.v;
  const PhasePoint root{xi + v1 * cx.t, v1};

  std::uniform_real_distribution<double> unif_t(0.0, cx.t);
  NodeVariables nodes;
  nodes.times.resize(n);
  nodes.omegas.resize(n);
  nodes.velocities.resize(n);
  double proposal = cx.f0->position_marginal(xi) * cx.f0->velocity_marginal(v1);
  for (int i = 0; i < n; ++i) {
    nodes.times[i] = unif_t(rng);
    nodes.omegas[i] = draw_unit_sphere(rng);
    nodes.velocities[i] = cx.f0->sample_velocity(rng);
    proposal *= cx.f0->velocity_marginal(nodes.velocities[i]);
  }
  if (n > 0 && !admissible_times(pm, nodes.times, cx.t)) return 0.0;

  FlowState trace;
  try {
    trace = backward_flow(root, tree, signs, nodes, cx.t, cx.a);
  } catch (const InvalidNodesError&) {
    return 0.0;  // outside the admissible hemisphere
  }

  double f0_product = 1.0;
  for (const auto& z : trace.particles) f0_product *= cx.f0->density(z);
  const double brackets = jacobian_weight(trace, cx.a) / ipow(cx.a * cx.a, n);
  const double base = ipow(cx.lambda, n) * brackets *
                      ipow(cx.t * 2.0 * kTwoPi, n) * f0_product / proposal *
                      (*cx.phi)(root);
  return cx.absolute ? std::abs(base)
                     : sign_product(signs.sigmas) * base;
}

TermStats estimate_term(const McContext& cx, const PartialTree& tree,
                        const SignSequence& signs, std::uint64_t samples,
                        std::uint64_t seed, int n, int tree_idx, int sign_idx,
                        McMode mode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n),
                    static_cast<std::uint32_t>(tree_idx),
                    static_cast<std::uint32_t>(sign_idx),
                    static_cast<std::uint32_t>(mode == McMode::initial_tuples
                                                   ? 0
                                                   : 1)};
  std::mt19937_64 rng(seq);
  const ParentMap pm = n > 0 ? parent_map(tree) : ParentMap{};
  std::vector<double> weights(samples);
  for (std::uint64_t s = 0; s < samples; ++s) {
    weights[s] = mode == McMode::initial_tuples
                     ? draw_initial_tuples(cx, tree, signs, rng)
                     : draw_node_variables(cx, tree, pm, signs, rng);
  }
  return reduce(weights);
}

}  // namespace

MCEstimate weak_mc_estimate(const DensitySpec& f0, const TestFunction& phi,
                            double t, double lambda, double a, int n_max,
                            std::uint64_t samples, std::uint64_t seed,
                            McMode mode) {
  if (t < 0.0 || a <= 0.0 || lambda < 0.0 || n_max < 0 || samples == 0) {
    throw InvalidArgumentError("weak_mc_estimate: bad parameters");
  }
  MCEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.mode = mode;
  est.beyond_radius = lambda > 0.5 * convergence_radius(a, f0.mass);

  McContext cx{&f0, &phi, t, lambda, a, false};
  double variance = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double order_value = 0.0;
    double order_variance = 0.0;
    if (t > 0.0 || n == 0) {
      const auto trees = enumerate_partial(n);
      const auto sign_choices = enumerate_signs(n);
      for (std::size_t ti = 0; ti < trees.size(); ++ti) {
        for (std::size_t si = 0; si < sign_choices.size(); ++si) {
          const TermStats st =
              estimate_term(cx, trees[ti], sign_choices[si], samples, seed, n,
                            static_cast<int>(ti), static_cast<int>(si), mode);
          order_value += st.mean;
          order_variance += st.variance_of_mean;
        }
      }
    }
    est.by_n.push_back(order_value);
    est.std_error_by_n.push_back(std::sqrt(order_variance));
    est.value += order_value;
    variance += order_variance;
  }
  est.std_error = std::sqrt(variance);
  return est;
}

DecayReport verify_geometric_decay(const DensitySpec& f0,
                                   const TestFunction& phi, double t,
                                   double lambda, double a, int n_max,
                                   std::uint64_t samples, std::uint64_t seed) {
  if (t < 0.0 || a <= 0.0 || lambda < 0.0 || n_max < 0 || samples == 0) {
    throw InvalidArgumentError("verify_geometric_decay: bad parameters");
  }
  DecayReport rep;
  rep.pass = true;
  McContext cx{&f0, &phi, t, lambda, a, true};
  for (int n = 0; n <= n_max; ++n) {
    double mass = 0.0;
    double variance = 0.0;
    if (t > 0.0 || n == 0) {
      const auto trees = enumerate_partial(n);
      const auto sign_choices = enumerate_signs(n);
      for (std::size_t ti = 0; ti < trees.size(); ++ti) {
        for (std::size_t si = 0; si < sign_choices.size(); ++si) {
          const TermStats st = estimate_term(
              cx, trees[ti], sign_choices[si], samples, seed, n,
              static_cast<int>(ti), static_cast<int>(si),
              McMode::initial_tuples);
          mass += st.mean;
          variance += st.variance_of_mean;
        }
      }
    }
    const double err = std::sqrt(variance);
    const double bound = term_norm_bound(n, lambda, a, f0.mass);
    rep.mass.push_back(mass);
    rep.std_error.push_back(err);
    rep.bound.push_back(bound);
    if (mass > bound + 3.0 * err) {
      rep.pass = false;
      if (rep.violated_n < 0) rep.violated_n = n;
    }
  }
  return rep;
}

std::size_t GridDensity::cell_count() const {
  std::size_t c = 1;
  for (int d = 0; d < 3; ++d) c *= static_cast<std::size_t>(nx[d]);
  for (int d = 0; d < 3; ++d) c *= static_cast<std::size_t>(nv[d]);
  return c;
}

Vec3 GridDensity::x_step() const {
  Vec3 h;
  for (int d = 0; d < 3; ++d) h[d] = (x_hi[d] - x_lo[d]) / nx[d];
  return h;
}

Vec3 GridDensity::v_step() const {
  Vec3 h;
  for (int d = 0; d < 3; ++d) h[d] = (v_hi[d] - v_lo[d]) / nv[d];
  return h;
}

void GridDensity::fill(const std::function<double(const PhasePoint&)>& f) {
  const Vec3 hx = x_step();
  const Vec3 hv = v_step();
  values.assign(cell_count(), 0.0);
  std::size_t idx = 0;
  for (int ix = 0; ix < nx[0]; ++ix) {
    for (int iy = 0; iy < nx[1]; ++iy) {
      for (int iz = 0; iz < nx[2]; ++iz) {
        const Vec3 x = x_lo + Vec3((ix + 0.5) * hx[0], (iy + 0.5) * hx[1],
                                   (iz + 0.5) * hx[2]);
        for (int jx = 0; jx < nv[0]; ++jx) {
          for (int jy = 0; jy < nv[1]; ++jy) {
            for (int jz = 0; jz < nv[2]; ++jz) {
              const Vec3 v =
                  v_lo + Vec3((jx + 0.5) * hv[0], (jy + 0.5) * hv[1],
                              (jz + 0.5) * hv[2]);
              values[idx++] = f(PhasePoint{x, v});
            }
          }
        }
      }
    }
  }
}

double h_functional(const GridDensity& f, double lambda, double a) {
  if (a <= 0.0) throw InvalidArgumentError("h_functional: need a > 0");
  if (f.values.size() != f.cell_count()) {
    throw InvalidArgumentError("h_functional: grid size mismatch");
  }
  const Vec3 hx = f.x_step();
  const Vec3 hv = f.v_step();
  for (int d = 0; d < 3; ++d) {
    if (hx[d] <= 0.0 || hv[d] <= 0.0) {
      throw InvalidArgumentError("h_functional: degenerate grid box");
    }
    if (hx[d] > 0.5 * a) {
      throw RefinementFailureError(
          "h_functional: spatial grid coarser than a/2");
    }
  }
  const double dVx = hx[0] * hx[1] * hx[2];
  const double dVv = hv[0] * hv[1] * hv[2];
  const std::size_t n_space =
      static_cast<std::size_t>(f.nx[0]) * f.nx[1] * f.nx[2];
  const std::size_t n_vel =
      static_cast<std::size_t>(f.nv[0]) * f.nv[1] * f.nv[2];

  double entropy = 0.0;
  std::vector<double> rho(n_space, 0.0);
  for (std::size_t is = 0; is < n_space; ++is) {
    for (std::size_t iv = 0; iv < n_vel; ++iv) {
      const double val = f.values[is * n_vel + iv];
      if (val < 0.0) throw InvalidArgumentError("h_functional: negative f");
      if (val > 0.0) entropy += val * std::log(val);
      rho[is] += val * dVv;
    }
  }
  entropy *= dVx * dVv;

  std::vector<Vec3> centers(n_space);
  std::size_t is = 0;
  for (int ix = 0; ix < f.nx[0]; ++ix) {
    for (int iy = 0; iy < f.nx[1]; ++iy) {
      for (int iz = 0; iz < f.nx[2]; ++iz) {
        centers[is++] = f.x_lo + Vec3((ix + 0.5) * hx[0], (iy + 0.5) * hx[1],
                                      (iz + 0.5) * hx[2]);
      }
    }
  }
  double pair = 0.0;
  for (std::size_t i = 0; i < n_space; ++i) {
    if (rho[i] == 0.0) continue;
    for (std::size_t j = 0; j < n_space; ++j) {
      if ((centers[i] - centers[j]).norm() < a) pair += rho[i] * rho[j];
    }
  }
  pair *= 0.5 * lambda * dVx * dVx;
  return entropy + pair;
}

}  // namespace enskog
