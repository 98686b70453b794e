#include "enskog/trees.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace enskog {

std::vector<int> ParentMap::children_of(int label) const {
  std::vector<int> out;
  for (int child = 2; child <= particle_count(); ++child) {
    if (parent_of(child) == label) out.push_back(child);
  }
  return out;
}

namespace {

void check_cap(int n, int cap) {
  if (n > cap) {
    throw CapExceededError("tree order " + std::to_string(n) +
                           " exceeds enumeration cap " + std::to_string(cap));
  }
}

}  // namespace

std::vector<FullTree> enumerate_full(int n, int j, int cap) {
  if (n < 0 || j < 1) throw InvalidArgumentError("enumerate_full: need n >= 0, j >= 1");
  check_cap(n, cap);
  std::vector<FullTree> out;
  FullTree current;
  current.r.assign(n, 1);
  // Odometer over the product of ranges {1..j}, {1..j+1}, ..., lexicographic.
  while (true) {
    out.push_back(current);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (current.r[i] < j + i) {
        ++current.r[i];
        std::fill(current.r.begin() + i + 1, current.r.end(), 1);
        break;
      }
    }
    if (i < 0) break;
    if (n == 0) break;
  }
  return out;
}

bool is_realizable(const std::vector<int>& k) {
  const int n = static_cast<int>(k.size());
  long long sum = 0;
  for (int v : k) {
    if (v < 0) return false;
    sum += v;
  }
  if (sum != n) return false;
  if (n >= 1 && k[0] < 1) return false;
  // Sweep the offset naming: after processing k_1..k_{i-1}, labels 1..K_i
  // exist. A particle that creates must itself exist already.
  long long created = 1;  // K_i
  for (int i = 1; i <= n; ++i) {
    if (k[i - 1] > 0 && i > created) return false;
    created += k[i - 1];
  }
  return true;
}

std::vector<PartialTree> enumerate_partial(int n, int cap) {
  if (n < 0) throw InvalidArgumentError("enumerate_partial: need n >= 0");
  check_cap(n, cap);
  std::vector<PartialTree> out;
  std::vector<int> k(n, 0);
  // Depth-first over k_1..k_n with the running-sum bound; realizability is
  // checked constructively at the leaves.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n) {
      if (remaining == 0 && is_realizable(k)) out.push_back(PartialTree{k});
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[pos] = v;
      self(self, pos + 1, remaining - v);
    }
    k[pos] = 0;
  };
  if (n == 0) {
    out.push_back(PartialTree{{}});
  } else {
    rec(rec, 0, n);
  }
  return out;
}

std::vector<int> offsets(const PartialTree& k) {
  std::vector<int> K(k.order());
  int acc = 1;
  for (int i = 0; i < k.order(); ++i) {
    K[i] = acc;
    acc += k.k[i];
  }
  return K;
}

ParentMap parent_map(const PartialTree& k) {
  if (!is_realizable(k.k)) {
    throw InvalidTreeError("unrealizable partially ordered tree");
  }
  const int n = k.order();
  ParentMap pm;
  pm.parent.assign(n, 0);
  const std::vector<int> K = offsets(k);
  for (int i = 1; i <= n; ++i) {
    for (int c = 0; c < k.k[i - 1]; ++c) {
      const int child = K[i - 1] + 1 + c;  // labels K_i+1 .. K_i+k_i
      pm.parent[child - 2] = i;
    }
  }
  return pm;
}

PartialTree class_of(const FullTree& r) {
  const int n = r.order();
  // Old labels 1..n+1: particle i+1 has parent r_i; a smaller index means a
  // later creation time, so increasing old label = same-parent birth order.
  std::vector<std::vector<int>> children_old(n + 2);
  for (int i = 1; i <= n; ++i) {
    if (r.r[i - 1] < 1 || r.r[i - 1] > i) {
      throw InvalidTreeError("fully ordered tree entry out of range");
    }
    children_old[r.r[i - 1]].push_back(i + 1);
  }
  // Relabel: particle i's children take the next free labels in birth order.
  std::vector<int> new_to_old;
  new_to_old.reserve(n + 1);
  new_to_old.push_back(1);
  for (std::size_t i = 0; i < new_to_old.size(); ++i) {
    for (int child : children_old[new_to_old[i]]) new_to_old.push_back(child);
  }
  PartialTree k;
  k.k.resize(n);
  for (int i = 0; i < n; ++i) {
    k.k[i] = static_cast<int>(children_old[new_to_old[i]].size());
  }
  return k;
}

namespace {

std::uint64_t extensions(const ParentMap& pm, std::vector<bool>& placed,
                         int remaining) {
  if (remaining == 0) return 1;
  const int n1 = pm.particle_count();
  std::uint64_t total = 0;
  // Choose which creation event carries the largest remaining time: its
  // parent must already be placed (or be the root) and it must be the
  // smallest unplaced child of that parent.
  for (int m = 2; m <= n1; ++m) {
    if (placed[m]) continue;
    const int p = pm.parent_of(m);
    if (p != 1 && !placed[p]) continue;
    bool earliest_sibling = true;
    for (int s = 2; s < m; ++s) {
      if (!placed[s] && pm.parent_of(s) == p) {
        earliest_sibling = false;
        break;
      }
    }
    if (!earliest_sibling) continue;
    placed[m] = true;
    total += extensions(pm, placed, remaining - 1);
    placed[m] = false;
  }
  return total;
}

}  // namespace

std::uint64_t class_size(const PartialTree& k) {
  const ParentMap pm = parent_map(k);
  std::vector<bool> placed(pm.particle_count() + 1, false);
  return extensions(pm, placed, k.order());
}

TreeCounts count_bound_check(int n, int cap) {
  check_cap(n, cap);
  TreeCounts c;
  c.full = enumerate_full(n, 1, cap).size();
  c.partial = enumerate_partial(n, cap).size();
  return c;
}

}  // namespace enskog
