#include "enskog/empirical.hpp"

#include "enskog/collision.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

namespace enskog {

EmpiricalMeasure measure_of(const HardSphereConfig& config) {
  return EmpiricalMeasure{config.particles, config.diameter};
}

void require_physical(const EmpiricalMeasure& mu) {
  HardSphereConfig cfg;
  cfg.particles = mu.atoms;
  cfg.diameter = mu.diameter;
  require_physical(cfg);
}

namespace {

struct Track {
  double seg_start = 0.0;
  double last_event = 0.0;
  PhasePoint seg;

  [[nodiscard]] PhasePoint at(double s) const {
    return seg.streamed(s - seg_start);
  }
};

struct PairEvent {
  int parent = 0;
  int child = 0;
};

// Absorption order of the forward flow: depth first, larger labels first, a
// pair fires only after the child's own subtree is finished.
std::vector<PairEvent> event_sequence(const ParentMap& pm) {
  std::vector<PairEvent> events;
  auto rec = [&](auto&& self, int i) -> void {
    auto children = pm.children_of(i);
    std::sort(children.begin(), children.end(), std::greater<>());
    for (int c : children) {
      self(self, c);
      events.push_back(PairEvent{i, c});
    }
  };
  rec(rec, 1);
  return events;
}

// Depth-first sum over support tuples of one tree. Atom choices are made
// lazily at the first event needing each label and the branch is abandoned at
// the first failing designated contact, so collision-free atoms cost one
// contact test instead of N^(n+1) flow runs. Signs branch inside the search
// (or follow a fixed assignment when one is supplied).
class TreeExpansion {
 public:
  struct Accum {
    double phi_sum = 0.0;
    std::uint64_t tuples = 0;
  };

  TreeExpansion(const EmpiricalMeasure& mu, const PartialTree& tree, double t,
                const TestFunction& phi, const std::vector<int>* fixed_signs)
      : mu_(mu),
        phi_(phi),
        t_(t),
        a_(mu.diameter),
        tol_(kSimultaneousTol * std::max(t, 1.0)),
        n_(tree.order()),
        fixed_(fixed_signs),
        events_(event_sequence(parent_map(tree))),
        tracks_(n_ + 1),
        atom_of_(n_ + 2, -1),
        sign_of_(n_ + 2, 0) {}

  std::map<std::vector<int>, Accum> run() {
    dfs(0);
    return std::move(acc_);
  }

 private:
  void dfs(int m) {
    if (m == n_) {
      record();
      return;
    }
    const auto [i, c] = events_[m];
    if (atom_of_[i] < 0) {
      assign(i, m);
      return;
    }
    if (atom_of_[c] < 0) {
      assign(c, m);
      return;
    }
    step(m);
  }

  void assign(int label, int m) {
    for (int x = 0; x < mu_.size(); ++x) {
      atom_of_[label] = x;
      tracks_[label - 1] = Track{0.0, 0.0, mu_.atoms[x]};
      dfs(m);
    }
    atom_of_[label] = -1;
  }

  void step(int m) {
    const auto [i, c] = events_[m];
    Track& pt = tracks_[i - 1];
    Track& ct = tracks_[c - 1];
    const double lo = std::max(pt.last_event, ct.last_event);
    const PhasePoint pi = pt.at(lo);
    const PhasePoint pc = ct.at(lo);
    const auto root_s = free_contact_root(pc.x - pi.x, pc.v - pi.v, a_);
    if (!root_s || *root_s <= tol_) return;
    const double s = lo + *root_s;
    if (std::abs(s - t_) <= tol_) {
      throw BoundaryPathology("designated contact at the horizon, tuple " +
                              tuple_string());
    }
    if (s > t_) return;

    const PhasePoint qi = pt.at(s);
    const PhasePoint qc = ct.at(s);
    const Vec3 omega = contact_normal(qi.x, qc.x);
    const Vec3 dv = qi.v - qc.v;
    if (std::abs(omega.dot(dv)) < kGrazeTol * dv.norm()) {
      throw GrazingPathology("grazing designated contact, tuple " +
                             tuple_string());
    }

    const Track saved_p = pt;
    const Track saved_c = ct;
    for (int sigma : {+1, -1}) {
      if (fixed_ && (*fixed_)[c - 2] != sigma) continue;
      Vec3 parent_velocity = qi.v;
      if (sigma > 0) {
        parent_velocity = elastic_reflect(qi.v, qc.v, omega).first;
      }
      pt = Track{s, s, PhasePoint{qi.x, parent_velocity}};
      ct.last_event = s;
      sign_of_[c] = sigma;
      dfs(m + 1);
      pt = saved_p;
      ct = saved_c;
    }
  }

  void record() {
    std::vector<int> signs(n_);
    for (int m = 2; m <= n_ + 1; ++m) signs[m - 2] = sign_of_[m];
    Accum& acc = acc_[signs];
    acc.phi_sum += phi_(tracks_[0].at(t_));
    ++acc.tuples;
  }

  [[nodiscard]] std::string tuple_string() const {
    std::ostringstream out;
    out << "(";
    for (int l = 1; l <= n_ + 1; ++l) {
      if (l > 1) out << ",";
      if (atom_of_[l] >= 0) {
        out << atom_of_[l] + 1;
      } else {
        out << "?";
      }
    }
    out << ")";
    return out.str();
  }

  const EmpiricalMeasure& mu_;
  const TestFunction& phi_;
  double t_;
  double a_;
  double tol_;
  int n_;
  const std::vector<int>* fixed_;
  std::vector<PairEvent> events_;
  std::vector<Track> tracks_;
  std::vector<int> atom_of_;
  std::vector<int> sign_of_;
  std::map<std::vector<int>, Accum> acc_;
};

double ipow(double base, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

int sign_product(const std::vector<int>& sigmas) {
  int p = 1;
  for (int s : sigmas) p *= s;
  return p;
}

}  // namespace

double term_value(const EmpiricalMeasure& mu0, const PartialTree& tree,
                  const SignSequence& signs, double t, const TestFunction& phi,
                  double lambda, std::uint64_t* tuple_count) {
  const int n = tree.order();
  if (signs.order() != n) {
    throw InvalidArgumentError("term_value: tree/sign orders disagree");
  }
  const int N = mu0.size();
  const double a = mu0.diameter;
  if (n == 0) {
    double sum = 0.0;
    for (const auto& atom : mu0.atoms) sum += phi(atom.streamed(t));
    if (tuple_count) *tuple_count = static_cast<std::uint64_t>(N);
    return sum / N;
  }
  auto acc = TreeExpansion(mu0, tree, t, phi, &signs.sigmas).run();
  const auto it = acc.find(signs.sigmas);
  if (it == acc.end()) {
    if (tuple_count) *tuple_count = 0;
    return 0.0;
  }
  if (tuple_count) *tuple_count = it->second.tuples;
  return ipow(lambda / (a * a), n) * sign_product(signs.sigmas) *
         it->second.phi_sum / ipow(static_cast<double>(N), n + 1);
}

SeriesReport evaluate(const EmpiricalMeasure& mu0, double t,
                      const TestFunction& phi, int n_max,
                      std::optional<double> lambda) {
  if (t < 0.0) throw InvalidArgumentError("evaluate: negative horizon");
  if (n_max < 0) throw InvalidArgumentError("evaluate: negative n_max");
  require_physical(mu0);
  const int N = mu0.size();
  const double a = mu0.diameter;
  const double lam = lambda.value_or(N * a * a);
  const double per_order = lam / (a * a);

  SeriesReport rep;
  int empty_streak = 0;
  int last_order = -1;
  for (int n = 0; n <= n_max; ++n) {
    double order_total = 0.0;
    std::uint64_t order_tuples = 0;
    if (n == 0) {
      TermRecord rec;
      rec.n = 0;
      rec.tuple_count = static_cast<std::uint64_t>(N);
      rec.value = term_value(mu0, PartialTree{{}}, SignSequence{{}}, t, phi,
                             lam, nullptr);
      order_total = rec.value;
      rep.terms.push_back(std::move(rec));
    } else {
      const int cap = std::max(n, kDefaultEnumerationCap);
      for (const auto& tree : enumerate_partial(n, cap)) {
        auto acc = TreeExpansion(mu0, tree, t, phi, nullptr).run();
        for (const auto& [sigmas, a_acc] : acc) {
          TermRecord rec;
          rec.n = n;
          rec.k = tree.k;
          rec.sigmas = sigmas;
          rec.tuple_count = a_acc.tuples;
          rec.value = ipow(per_order, n) * sign_product(sigmas) *
                      a_acc.phi_sum / ipow(static_cast<double>(N), n + 1);
          order_total += rec.value;
          order_tuples += a_acc.tuples;
          rep.terms.push_back(std::move(rec));
        }
      }
    }
    rep.totals_by_n.push_back(order_total);
    rep.total += order_total;
    last_order = n;
    empty_streak = (n >= 1 && order_tuples == 0) ? empty_streak + 1 : 0;
    // Two consecutive orders with no support tuples: the collision structure
    // of the data is exhausted and deeper trees cannot re-enter.
    if (empty_streak >= 2) break;
  }

  rep.vanishing_from = 0;
  for (const auto& rec : rep.terms) {
    if (rec.value != 0.0) rep.vanishing_from = rec.n + 1;
  }
  bool last_active = false;
  for (const auto& rec : rep.terms) {
    if (rec.n == last_order && rec.value != 0.0) last_active = true;
  }
  rep.truncated = (last_order == n_max) && last_active;
  return rep;
}

namespace {

// True when the configuration minus one particle streams without any
// collision over the window.
bool deleted_flow_free(const HardSphereConfig& full, int drop_label,
                       double duration) {
  HardSphereConfig sub;
  sub.diameter = full.diameter;
  sub.clock = full.clock;
  for (int l = 1; l <= full.size(); ++l) {
    if (l != drop_label) sub.particles.push_back(full.particles[l - 1]);
  }
  if (sub.size() <= 1) return true;
  return advance(sub, duration).trajectory.events.empty();
}

}  // namespace

std::vector<double> partition_times(const HardSphereConfig& z0, double t) {
  if (t <= 0.0) throw InvalidArgumentError("partition_times: need t > 0");
  const auto out = advance(z0, t);
  const auto& events = out.trajectory.events;
  const double t0 = z0.clock;
  const double t_end = t0 + t;
  const double tol = kSimultaneousTol * std::max(t, 1.0);
  if (!events.empty() && t_end - events.back().time <= tol) {
    throw InvalidArgumentError("partition_times: collision at the horizon");
  }
  if (!events.empty() && events.front().time - t0 <= tol) {
    throw InvalidArgumentError("partition_times: collision at the start");
  }

  std::vector<double> cuts{t0};
  const int M = static_cast<int>(events.size());
  for (int m = 0; m < M; ++m) {
    const double tau = events[m].time;
    double lo = (m == 0) ? 0.5 * (t0 + tau) : 0.5 * (events[m - 1].time + tau);
    double hi =
        (m == M - 1) ? 0.5 * (tau + t_end) : 0.5 * (tau + events[m + 1].time);
    bool ok = false;
    for (int iter = 0; iter < 60; ++iter) {
      const auto full = state_at(out.trajectory, lo);
      if (deleted_flow_free(full, events[m].i, hi - lo) &&
          deleted_flow_free(full, events[m].j, hi - lo)) {
        ok = true;
        break;
      }
      lo = 0.5 * (lo + tau);
      hi = 0.5 * (tau + hi);
    }
    if (!ok) {
      throw RefinementFailureError(
          "partition_times: no free deleted flow around the collision at t=" +
          std::to_string(tau));
    }
    if (lo > cuts.back() + tol) cuts.push_back(lo);
    cuts.push_back(hi);
  }
  if (t_end > cuts.back() + tol) {
    cuts.push_back(t_end);
  } else {
    cuts.back() = t_end;
  }
  return cuts;
}

SeriesReport verify_microscopic(const HardSphereConfig& z0, double t,
                                const TestFunction& phi,
                                std::optional<double> lambda, int n_max) {
  const int N = z0.size();
  const double a = z0.diameter;
  const double lam = lambda.value_or(N * a * a);

  const auto sim = advance(z0, t);
  const auto theta = partition_times(z0, t);

  double max_disc = 0.0;
  SeriesReport last;
  for (std::size_t j = 0; j + 1 < theta.size(); ++j) {
    const auto start = state_at(sim.trajectory, theta[j]);
    const auto end = state_at(sim.trajectory, theta[j + 1]);
    EmpiricalMeasure mu = measure_of(start);
    SeriesReport rep =
        evaluate(mu, theta[j + 1] - theta[j], phi, n_max, lam);
    double ref = 0.0;
    for (const auto& p : end.particles) ref += phi(p);
    ref /= N;
    rep.reference = ref;
    rep.discrepancy = std::abs(rep.total - ref);
    max_disc = std::max(max_disc, rep.discrepancy);
    last = std::move(rep);
  }
  // Headline: the final-time reference with the worst interval discrepancy.
  last.discrepancy = max_disc;
  return last;
}

double expansion_value(const HardSphereConfig& z0, double t,
                       const TestFunction& phi, std::optional<double> lambda,
                       int n_max, bool* chained) {
  const double lam = lambda.value_or(z0.size() * z0.diameter * z0.diameter);
  if (chained) *chained = false;
  const SeriesReport direct = evaluate(measure_of(z0), t, phi, n_max, lam);
  if (!direct.truncated) return direct.total;

  // The single-window sum was still active at n_max. Within each partition
  // interval at most one collision occurs and the expansion terminates, so
  // compose: the evolved measure at each cut is empirical with the simulator
  // atoms, and the window value is the last interval's expansion.
  if (chained) *chained = true;
  const auto sim = advance(z0, t);
  const auto theta = partition_times(z0, t);
  const auto start = state_at(sim.trajectory, theta[theta.size() - 2]);
  return evaluate(measure_of(start), theta.back() - theta[theta.size() - 2],
                  phi, n_max, lam)
      .total;
}

SemigroupReport verify_semigroup(const HardSphereConfig& z0, double tau,
                                 double t, const TestFunction& phi,
                                 int n_max) {
  if (!(0.0 < tau && tau < t)) {
    throw InvalidArgumentError("verify_semigroup: need 0 < tau < t");
  }
  const int N = z0.size();
  const double tol = kSimultaneousTol * std::max(t, 1.0);
  const auto sim = advance(z0, t);
  for (const auto& ev : sim.trajectory.events) {
    if (std::abs(ev.time - (z0.clock + tau)) <= tol) {
      throw InvalidArgumentError("verify_semigroup: collision at tau");
    }
  }

  SemigroupReport rep;
  bool chained = false;
  rep.direct = expansion_value(z0, t, phi, std::nullopt, n_max, &chained);
  rep.chained |= chained;

  const double stage =
      expansion_value(z0, tau, phi, std::nullopt, n_max, &chained);
  rep.chained |= chained;
  const auto at_tau = state_at(sim.trajectory, z0.clock + tau);
  double sim_tau = 0.0;
  for (const auto& p : at_tau.particles) sim_tau += phi(p);
  sim_tau /= N;
  rep.stage_discrepancy = std::abs(stage - sim_tau);
  rep.composed =
      expansion_value(at_tau, t - tau, phi, std::nullopt, n_max, &chained);
  rep.chained |= chained;

  double sim_t = 0.0;
  for (const auto& p : sim.config.particles) sim_t += phi(p);
  sim_t /= N;
  rep.simulator = sim_t;

  rep.max_discrepancy = std::max({std::abs(rep.direct - rep.composed),
                                  std::abs(rep.direct - rep.simulator),
                                  std::abs(rep.composed - rep.simulator),
                                  rep.stage_discrepancy});
  rep.pass = rep.max_discrepancy <= 1e-9 * (1.0 + std::abs(rep.simulator));
  return rep;
}

double interacting_term_value(const EmpiricalMeasure& mu0, const FullTree& tree,
                              const SignSequence& signs, double t,
                              const TestFunction& phi, double lambda,
                              std::uint64_t* tuple_count) {
  const int n = tree.order();
  if (signs.order() != n) {
    throw InvalidArgumentError(
        "interacting_term_value: tree/sign orders disagree");
  }
  const int N = mu0.size();
  const double a = mu0.diameter;
  if (tuple_count) *tuple_count = 0;
  if (n + 1 > N) return 0.0;  // no tuple of distinct atoms exists

  double sum = 0.0;
  std::uint64_t passing = 0;
  std::vector<int> pick;
  std::vector<bool> used(N, false);
  std::vector<PhasePoint> zeta0(n + 1);
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n + 1) {
      const auto z1 = interacting_forward_flow(zeta0, tree, signs, t, a);
      if (z1) {
        sum += phi(*z1);
        ++passing;
      }
      return;
    }
    for (int x = 0; x < N; ++x) {
      if (used[x]) continue;
      used[x] = true;
      zeta0[depth] = mu0.atoms[x];
      self(self, depth + 1);
      used[x] = false;
    }
  };
  rec(rec, 0);
  if (tuple_count) *tuple_count = passing;
  return ipow(lambda / (a * a), n) * sign_product(signs.sigmas) * sum /
         ipow(static_cast<double>(N), n + 1);
}

RepresentationReport compare_representations(const HardSphereConfig& z0,
                                             double t, const TestFunction& phi,
                                             int n_max) {
  const int N = z0.size();
  const double lam = N * z0.diameter * z0.diameter;
  const EmpiricalMeasure mu0 = measure_of(z0);

  RepresentationReport rep;
  const SeriesReport contracted = evaluate(mu0, t, phi, n_max, lam);
  rep.contracted_by_n = contracted.totals_by_n;
  rep.contracted_total = contracted.total;
  if (contracted.truncated) {
    rep.contracted_total =
        expansion_value(z0, t, phi, lam, n_max, &rep.contracted_chained);
  }

  for (int n = 0; n <= std::min(n_max, N - 1); ++n) {
    double order_total = 0.0;
    if (n == 0) {
      order_total = term_value(mu0, PartialTree{{}}, SignSequence{{}}, t, phi,
                               lam, nullptr);
    } else {
      for (const auto& tree : enumerate_full(n)) {
        for (const auto& signs : enumerate_signs(n)) {
          order_total +=
              interacting_term_value(mu0, tree, signs, t, phi, lam, nullptr);
        }
      }
    }
    rep.interacting_by_n.push_back(order_total);
    rep.interacting_total += order_total;
  }

  const auto sim = advance(z0, t);
  double ref = 0.0;
  for (const auto& p : sim.config.particles) ref += phi(p);
  rep.simulator = ref / N;
  rep.difference = rep.contracted_total - rep.interacting_total;
  return rep;
}

}  // namespace enskog
