#include "enskog/flows.hpp"

#include "enskog/collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace enskog {

std::vector<SignSequence> enumerate_signs(int n) {
  std::vector<SignSequence> out;
  const int count = 1 << n;
  out.reserve(count);
  for (int mask = 0; mask < count; ++mask) {
    SignSequence s;
    s.sigmas.resize(n);
    for (int i = 0; i < n; ++i) {
      s.sigmas[i] = (mask >> (n - 1 - i)) & 1 ? -1 : +1;
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

void check_orders(const PartialTree& tree, const SignSequence& signs, int n) {
  if (tree.order() != n || signs.order() != n) {
    throw InvalidArgumentError("tree/sign/node orders disagree");
  }
  for (int s : signs.sigmas) {
    if (s != 1 && s != -1) throw InvalidArgumentError("sign must be +1 or -1");
  }
}

double tie_tolerance(double t) { return kSimultaneousTol * std::max(t, 1.0); }

}  // namespace

FlowState backward_flow(const PhasePoint& root, const PartialTree& tree,
                        const SignSequence& signs, const NodeVariables& nodes,
                        double t, double a) {
  const int n = nodes.order();
  check_orders(tree, signs, n);
  if (static_cast<int>(nodes.omegas.size()) != n ||
      static_cast<int>(nodes.velocities.size()) != n) {
    throw InvalidArgumentError("node variable lists of unequal length");
  }
  const ParentMap pm = parent_map(tree);

  auto creation_time = [&](int label) { return nodes.times[label - 2]; };

  // chi_{k_n}: every time in (0, t), same-parent children strictly decreasing
  // in label order, each child created below its parent's creation time.
  for (int m = 2; m <= n + 1; ++m) {
    const double tm = creation_time(m);
    if (!(tm > 0.0 && tm < t)) {
      throw InvalidNodesError("creation time outside (0, t)");
    }
    const int p = pm.parent_of(m);
    const double parent_time = (p == 1) ? t : creation_time(p);
    if (!(tm < parent_time)) {
      throw InvalidNodesError("child created before its parent");
    }
  }
  for (int i = 1; i <= n; ++i) {
    const auto children = pm.children_of(i);
    for (std::size_t c = 1; c < children.size(); ++c) {
      if (!(creation_time(children[c]) < creation_time(children[c - 1]))) {
        throw InvalidNodesError("same-parent creation times not decreasing");
      }
    }
  }

  std::vector<int> order;  // creation processing order, backward in time
  for (int m = 2; m <= n + 1; ++m) order.push_back(m);
  std::sort(order.begin(), order.end(), [&](int l, int r) {
    if (creation_time(l) != creation_time(r)) {
      return creation_time(l) > creation_time(r);
    }
    return l < r;
  });

  std::vector<PhasePoint> state(n + 1);
  std::vector<bool> present(n + 2, false);
  state[0] = root;
  present[1] = true;
  double now = t;

  FlowState flow;
  for (int m : order) {
    const double tm = creation_time(m);
    for (int l = 1; l <= n + 1; ++l) {
      if (present[l]) state[l - 1].x -= state[l - 1].v * (now - tm);
    }
    now = tm;

    const int p = pm.parent_of(m);
    const Vec3& omega = nodes.omegas[m - 2];
    if (std::abs(omega.norm() - 1.0) > kUnitTol) {
      throw InvalidNodesError("impact direction is not a unit vector");
    }
    const Vec3 v_child = nodes.velocities[m - 2];
    const Vec3 eta_p = state[p - 1].v;
    if ((eta_p - v_child).dot(omega) < 0.0) {
      throw InvalidNodesError("(omega, velocity) pair outside the incoming hemisphere");
    }

    CreationRecord rec;
    rec.label = m;
    rec.parent = p;
    rec.time = tm;
    rec.sigma = signs.sigmas[m - 2];
    rec.omega = omega;
    rec.parent_velocity_before = eta_p;
    rec.child_velocity = v_child;
    flow.log.push_back(rec);

    if (rec.sigma < 0) {
      // Precollisional pair: created at +a omega, velocities untouched.
      state[m - 1] = PhasePoint{state[p - 1].x + a * omega, v_child};
    } else {
      // Postcollisional pair: created at -a omega, both continue backward
      // with the precollisional velocities.
      auto [vp, vc] = elastic_reflect(eta_p, v_child, omega);
      state[p - 1].v = vp;
      state[m - 1] = PhasePoint{state[p - 1].x - a * omega, vc};
    }
    present[m] = true;
  }

  for (int l = 1; l <= n + 1; ++l) {
    state[l - 1].x -= state[l - 1].v * now;
  }
  flow.particles = std::move(state);
  flow.clock = 0.0;
  return flow;
}

namespace {

struct Track {
  double seg_start = 0.0;
  PhasePoint seg_state;     // state at seg_start
  double last_event = 0.0;  // designation readiness

  [[nodiscard]] PhasePoint at(double s) const {
    return seg_state.streamed(s - seg_start);
  }
};

}  // namespace

std::optional<ForwardResult> forward_flow(const std::vector<PhasePoint>& zeta0,
                                          const PartialTree& tree,
                                          const SignSequence& signs, double t,
                                          double a) {
  const int n = tree.order();
  check_orders(tree, signs, n);
  if (static_cast<int>(zeta0.size()) != n + 1) {
    throw InvalidArgumentError("forward_flow: need n + 1 labeled particles");
  }
  const ParentMap pm = parent_map(tree);
  const double tol = tie_tolerance(t);

  std::vector<Track> tracks(n + 1);
  for (int l = 1; l <= n + 1; ++l) tracks[l - 1].seg_state = zeta0[l - 1];

  std::vector<double> absorption(n, 0.0);

  // Absorb the subtree of particle i, children largest label first: each
  // (parent, child) pair becomes designated once the parent's previous
  // absorption and the child's own subtree are done, and collides at the
  // first approaching distance-a contact after that.
  auto process = [&](auto&& self, int i) -> bool {
    auto children = pm.children_of(i);
    std::sort(children.begin(), children.end(), std::greater<>());
    for (int c : children) {
      if (!self(self, c)) return false;
      Track& pt = tracks[i - 1];
      Track& ct = tracks[c - 1];
      const double lo = std::max(pt.last_event, ct.last_event);
      const PhasePoint pi = pt.at(lo);
      const PhasePoint pc = ct.at(lo);
      const auto root_s = free_contact_root(pc.x - pi.x, pc.v - pi.v, a);
      if (!root_s) return false;
      if (*root_s <= tol) return false;  // boundary of A: coincident events
      const double s = lo + *root_s;
      if (std::abs(s - t) <= tol) {
        throw BoundaryPathology("designated contact of " + std::to_string(i) +
                                "," + std::to_string(c) +
                                " at the final instant");
      }
      if (s > t) return false;

      const PhasePoint pi_s = pt.at(s);
      const PhasePoint pc_s = ct.at(s);
      const Vec3 omega = contact_normal(pi_s.x, pc_s.x);
      const Vec3 dv = pi_s.v - pc_s.v;
      if (std::abs(omega.dot(dv)) < kGrazeTol * dv.norm()) {
        throw GrazingPathology("grazing designated contact of " +
                               std::to_string(i) + "," + std::to_string(c));
      }

      Vec3 parent_velocity = pi_s.v;
      if (signs.sigmas[c - 2] > 0) {
        parent_velocity = elastic_reflect(pi_s.v, pc_s.v, omega).first;
      }
      pt.seg_start = s;
      pt.seg_state = PhasePoint{pi_s.x, parent_velocity};
      pt.last_event = s;
      ct.last_event = s;
      absorption[c - 2] = s;
    }
    return true;
  };

  if (!process(process, 1)) return std::nullopt;

  ForwardResult result;
  result.z1_final = tracks[0].at(t);
  result.absorption_times = std::move(absorption);
  return result;
}

bool membership(const std::vector<PhasePoint>& zeta0, const PartialTree& tree,
                const SignSequence& signs, double t, double a, double epsilon) {
  if (epsilon < 0.0) throw InvalidArgumentError("membership: epsilon < 0");
  const auto result = forward_flow(zeta0, tree, signs, t, a);
  if (!result) return false;
  const ParentMap pm = parent_map(tree);
  for (int i = 1; i <= tree.order(); ++i) {
    const auto children = pm.children_of(i);
    for (std::size_t c = 1; c < children.size(); ++c) {
      const double gap = std::abs(result->absorption_times[children[c] - 2] -
                                  result->absorption_times[children[c - 1] - 2]);
      if (gap <= epsilon) return false;
    }
  }
  return true;
}

double jacobian_weight(const FlowState& trace, double a) {
  double w = 1.0;
  for (const auto& rec : trace.log) {
    w *= a * a *
         std::abs(rec.omega.dot(rec.child_velocity -
                                rec.parent_velocity_before));
  }
  return w;
}

std::optional<PhasePoint> interacting_forward_flow(
    const std::vector<PhasePoint>& zeta0, const FullTree& tree,
    const SignSequence& signs, double t, double a) {
  const int n = tree.order();
  if (signs.order() != n) throw InvalidArgumentError("tree/sign orders disagree");
  if (static_cast<int>(zeta0.size()) != n + 1) {
    throw InvalidArgumentError("interacting_forward_flow: need n + 1 particles");
  }
  const double tol = tie_tolerance(t);

  std::vector<PhasePoint> state = zeta0;
  std::vector<bool> alive(n + 2, false);
  for (int l = 1; l <= n + 1; ++l) alive[l] = true;
  int next_absorbed = n + 1;  // absorption order: largest label first
  double now = 0.0;

  std::uint64_t processed = 0;
  while (next_absorbed >= 2) {
    // Earliest approaching contact among alive pairs.
    double best = std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    bool tie = false;
    for (int i = 1; i <= n + 1; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j <= n + 1; ++j) {
        if (!alive[j]) continue;
        const auto s = free_contact_root(state[j - 1].x - state[i - 1].x,
                                         state[j - 1].v - state[i - 1].v, a);
        if (!s) continue;
        const double abs_s = now + *s;
        if (abs_s < best - tol) {
          best = abs_s;
          bi = i;
          bj = j;
          tie = false;
        } else if (abs_s <= best + tol) {
          tie = true;
        }
      }
    }
    if (bi == 0 || best > t) return std::nullopt;  // tree not realized by t
    if (tie) {
      throw SimultaneousCollisionPathology(
          "simultaneous contacts in the interacting forward flow");
    }
    if (std::abs(best - t) <= tol) {
      throw BoundaryPathology("interacting-flow contact at the final instant");
    }
    if (++processed > kMaxEventsPerAdvance) {
      throw EventCascadeError("interacting forward flow: event cascade");
    }

    for (int l = 1; l <= n + 1; ++l) {
      if (alive[l]) state[l - 1].x += state[l - 1].v * (best - now);
    }
    now = best;

    const Vec3 omega = contact_normal(state[bi - 1].x, state[bj - 1].x);
    const Vec3 dv = state[bi - 1].v - state[bj - 1].v;
    if (std::abs(omega.dot(dv)) < kGrazeTol * dv.norm()) {
      throw GrazingPathology("grazing contact in the interacting forward flow");
    }

    const int parent = tree.r[next_absorbed - 2];
    if (bj == next_absorbed && bi == parent) {
      // Designated absorption: the child disappears.
      if (signs.sigmas[next_absorbed - 2] > 0) {
        state[bi - 1].v =
            elastic_reflect(state[bi - 1].v, state[bj - 1].v, omega).first;
      }
      alive[bj] = false;
      --next_absorbed;
    } else {
      // Genuine recollision; the pending child may recollide with any
      // non-parent before being absorbed.
      auto [vi, vj] = elastic_reflect(state[bi - 1].v, state[bj - 1].v, omega);
      state[bi - 1].v = vi;
      state[bj - 1].v = vj;
    }
  }

  return state[0].streamed(t - now);
}

NodeVariables sample_node_variables(const PhasePoint& root,
                                    const PartialTree& tree,
                                    const SignSequence& signs, double t,
                                    double a, std::mt19937_64& rng,
                                    const VelocitySampler& sample_velocity) {
  (void)a;
  const int n = tree.order();
  check_orders(tree, signs, n);
  const ParentMap pm = parent_map(tree);

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_velocity = [&](std::mt19937_64& r) -> Vec3 {
    if (sample_velocity) return sample_velocity(r);
    return Vec3(gauss(r), gauss(r), gauss(r));
  };

  NodeVariables nodes;
  nodes.times.assign(n, 0.0);
  nodes.omegas.assign(n, Vec3::UnitX());
  nodes.velocities.assign(n, Vec3::Zero());
  for (int m = 2; m <= n + 1; ++m) nodes.velocities[m - 2] = draw_velocity(rng);

  // Same-parent times: sorted uniform draws below the parent's creation time.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto assign_times = [&](auto&& self, int i, double horizon) -> void {
    const auto children = pm.children_of(i);
    std::vector<double> draws(children.size());
    for (auto& d : draws) d = horizon * unit(rng);
    std::sort(draws.begin(), draws.end(), std::greater<>());
    for (std::size_t c = 0; c < children.size(); ++c) {
      nodes.times[children[c] - 2] = draws[c];
      self(self, children[c], draws[c]);
    }
  };
  assign_times(assign_times, 1, t);

  // Directions need the parent velocity at each creation instant, so walk
  // the creations backward in time, mirroring backward_flow (velocities only).
  std::vector<int> order;
  for (int m = 2; m <= n + 1; ++m) order.push_back(m);
  std::sort(order.begin(), order.end(), [&](int l, int r) {
    return nodes.times[l - 2] > nodes.times[r - 2];
  });

  std::vector<Vec3> velocity(n + 1);
  velocity[0] = root.v;
  for (int m : order) {
    const int p = pm.parent_of(m);
    const Vec3 v_child = nodes.velocities[m - 2];
    Vec3 omega;
    do {
      omega = Vec3(gauss(rng), gauss(rng), gauss(rng));
    } while (omega.norm() < 1e-12);
    omega.normalize();
    if ((velocity[p - 1] - v_child).dot(omega) < 0.0) omega = -omega;
    nodes.omegas[m - 2] = omega;
    if (signs.sigmas[m - 2] > 0) {
      auto [vp, vc] = elastic_reflect(velocity[p - 1], v_child, omega);
      velocity[p - 1] = vp;
      velocity[m - 1] = vc;
    } else {
      velocity[m - 1] = v_child;
    }
  }
  return nodes;
}

}  // namespace enskog
