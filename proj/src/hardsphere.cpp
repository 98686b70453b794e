#include "enskog/hardsphere.hpp"

#include "enskog/collision.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

namespace enskog {

std::optional<double> free_contact_root(const Vec3& dx, const Vec3& dv,
                                        double a) {
  const double c2 = dv.squaredNorm();
  if (c2 == 0.0) return std::nullopt;
  const double c1 = 2.0 * dx.dot(dv);
  const double c0 = dx.squaredNorm() - a * a;
  if (c1 >= 0.0) return std::nullopt;  // not approaching
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc <= 0.0) return std::nullopt;
  // Smaller root from the product of roots; avoids cancellation near grazing.
  const double q = 0.5 * (-c1 + std::sqrt(disc));
  const double s = c0 / q;
  return std::max(s, 0.0);
}

std::optional<double> time_to_contact(const PhasePoint& zi,
                                      const PhasePoint& zj, double a) {
  const Vec3 dx = zj.x - zi.x;
  if (dx.norm() < a * (1.0 - 1e-9)) {
    throw InvalidConfigurationError("time_to_contact: overlapping spheres");
  }
  return free_contact_root(dx, zj.v - zi.v, a);
}

void require_physical(const HardSphereConfig& config) {
  const double a = config.diameter;
  if (a <= 0.0) throw InvalidConfigurationError("non-positive diameter");
  if (config.size() < 1) throw InvalidConfigurationError("empty configuration");
  for (int i = 0; i < config.size(); ++i) {
    for (int j = i + 1; j < config.size(); ++j) {
      const double d = (config.particles[i].x - config.particles[j].x).norm();
      if (d < a * (1.0 - 1e-9)) {
        throw InvalidConfigurationError(
            "particles " + std::to_string(i + 1) + " and " +
            std::to_string(j + 1) + " overlap (distance " + std::to_string(d) +
            ")");
      }
    }
  }
}

namespace {

struct PendingEvent {
  double time;       // absolute
  int i, j;          // 0-based indices, i < j
  std::uint64_t ci, cj;  // collision counters at scheduling time

  bool operator>(const PendingEvent& other) const {
    return std::tie(time, i, j) > std::tie(other.time, other.i, other.j);
  }
};

}  // namespace

AdvanceResult advance(const HardSphereConfig& config, double t) {
  if (t < 0.0) throw InvalidArgumentError("advance: negative duration");
  require_physical(config);

  const double a = config.diameter;
  const double t_end = config.clock + t;
  const double time_scale = std::max(t, 1.0);

  std::vector<PhasePoint> state = config.particles;
  std::vector<std::uint64_t> counter(state.size(), 0);
  double now = config.clock;

  std::priority_queue<PendingEvent, std::vector<PendingEvent>,
                      std::greater<PendingEvent>>
      queue;

  auto schedule_pair = [&](int i, int j) {
    // Candidate contact from the current states; stale entries are filtered
    // by the collision counters when popped.
    auto s = free_contact_root(state[j].x - state[i].x,
                               state[j].v - state[i].v, a);
    if (s && now + *s <= t_end) {
      queue.push(PendingEvent{now + *s, i, j, counter[i], counter[j]});
    }
  };

  const int n = static_cast<int>(state.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) schedule_pair(i, j);
  }

  Trajectory traj;
  traj.initial = config;
  traj.horizon = t_end;

  std::uint64_t processed = 0;
  while (!queue.empty()) {
    const PendingEvent ev = queue.top();
    queue.pop();
    if (counter[ev.i] != ev.ci || counter[ev.j] != ev.cj) continue;  // stale

    // Any other still-valid event within the simultaneity window means two
    // distinct collisions we cannot order reliably.
    {
      std::vector<PendingEvent> peeked;
      bool simultaneous = false;
      while (!queue.empty() &&
             queue.top().time - ev.time <= kSimultaneousTol * time_scale) {
        const PendingEvent other = queue.top();
        queue.pop();
        peeked.push_back(other);
        if (counter[other.i] == other.ci && counter[other.j] == other.cj) {
          simultaneous = true;
        }
      }
      for (const auto& other : peeked) queue.push(other);
      if (simultaneous) {
        throw SimultaneousCollisionPathology(
            "two distinct collisions within tolerance at t=" +
            std::to_string(ev.time));
      }
    }

    if (++processed > kMaxEventsPerAdvance) {
      throw EventCascadeError("event cascade: more than " +
                              std::to_string(kMaxEventsPerAdvance) +
                              " collisions in one advance");
    }

    // Stream everyone to the event time and reflect the pair.
    const double dt = ev.time - now;
    for (auto& p : state) p.x += p.v * dt;
    now = ev.time;

    const Vec3 omega = contact_normal(state[ev.i].x, state[ev.j].x);
    const Vec3 dv = state[ev.i].v - state[ev.j].v;
    if (std::abs(omega.dot(dv)) < kGrazeTol * dv.norm()) {
      throw GrazingPathology("grazing collision of particles " +
                             std::to_string(ev.i + 1) + "," +
                             std::to_string(ev.j + 1) + " at t=" +
                             std::to_string(ev.time));
    }
    auto [vi, vj] = elastic_reflect(state[ev.i].v, state[ev.j].v, omega);
    state[ev.i].v = vi;
    state[ev.j].v = vj;
    ++counter[ev.i];
    ++counter[ev.j];

    traj.events.push_back(CollisionEvent{ev.i + 1, ev.j + 1, ev.time, omega});

    for (int k = 0; k < n; ++k) {
      if (k == ev.i || k == ev.j) continue;
      schedule_pair(std::min(k, ev.i), std::max(k, ev.i));
      schedule_pair(std::min(k, ev.j), std::max(k, ev.j));
    }
    schedule_pair(ev.i, ev.j);
  }

  const double dt = t_end - now;
  for (auto& p : state) p.x += p.v * dt;

  AdvanceResult result;
  result.config = HardSphereConfig{std::move(state), a, t_end};
  result.trajectory = std::move(traj);
  return result;
}

HardSphereConfig reverse(const HardSphereConfig& config) {
  HardSphereConfig out = config;
  for (auto& p : out.particles) p.v = -p.v;
  return out;
}

HardSphereConfig state_at(const Trajectory& traj, double s) {
  if (s < traj.initial.clock || s > traj.horizon) {
    throw InvalidArgumentError("state_at: time outside trajectory span");
  }
  HardSphereConfig out = traj.initial;
  double now = out.clock;
  for (const auto& ev : traj.events) {
    if (ev.time > s) break;
    const double dt = ev.time - now;
    for (auto& p : out.particles) p.x += p.v * dt;
    now = ev.time;
    auto [vi, vj] = elastic_reflect(out.particles[ev.i - 1].v,
                                    out.particles[ev.j - 1].v, ev.normal);
    out.particles[ev.i - 1].v = vi;
    out.particles[ev.j - 1].v = vj;
  }
  for (auto& p : out.particles) p.x += p.v * (s - now);
  out.clock = s;
  return out;
}

std::vector<MarginalAtom> marginal_support(const Trajectory& traj, double s,
                                           int j) {
  const int n = traj.initial.size();
  if (j < 1 || j > n) {
    throw InvalidArgumentError("marginal_support: need 1 <= j <= N");
  }
  const HardSphereConfig at = state_at(traj, s);

  double weight = 1.0;
  for (int m = 0; m < j; ++m) weight /= static_cast<double>(n - m);

  std::vector<MarginalAtom> atoms;
  std::vector<int> idx(j, 0);
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == j) {
      MarginalAtom atom;
      atom.weight = weight;
      atom.states.reserve(j);
      for (int m = 0; m < j; ++m) atom.states.push_back(at.particles[idx[m]]);
      atoms.push_back(std::move(atom));
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      idx[depth] = i;
      self(self, depth + 1);
      used[i] = false;
    }
  };
  rec(rec, 0);
  return atoms;
}

}  // namespace enskog
