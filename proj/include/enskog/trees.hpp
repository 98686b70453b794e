#pragma once

#include "enskog/types.hpp"

#include <cstdint>
#include <vector>

namespace enskog {

/// Fully ordered collision tree: r_i in {1, ..., j + i - 1} assigns the parent
/// of the (j+i)-th particle, with totally ordered creation times.
struct FullTree {
  std::vector<int> r;

  [[nodiscard]] int order() const { return static_cast<int>(r.size()); }
};

/// Partially ordered tree: k_i counts the particles created by particle i.
/// Particle labels follow the offset rule: particle i creates
/// K_i + 1, ..., K_i + k_i where K_i = 1 + sum_{l<i} k_l.
struct PartialTree {
  std::vector<int> k;

  [[nodiscard]] int order() const { return static_cast<int>(k.size()); }

  bool operator==(const PartialTree& other) const { return k == other.k; }
  bool operator<(const PartialTree& other) const { return k < other.k; }
};

/// parent[i] is the label of the parent of particle i + 2 (entries cover
/// particles 2 .. n+1); every parent label is smaller than its child's.
struct ParentMap {
  std::vector<int> parent;

  [[nodiscard]] int parent_of(int label) const { return parent.at(label - 2); }
  [[nodiscard]] int particle_count() const {
    return static_cast<int>(parent.size()) + 1;
  }
  /// Children of `label` in increasing label order.
  [[nodiscard]] std::vector<int> children_of(int label) const;
};

inline constexpr int kDefaultEnumerationCap = 8;

/// All fully ordered trees of order n with j roots, lexicographic.
/// There are j (j+1) ... (j+n-1) of them.
std::vector<FullTree> enumerate_full(int n, int j = 1,
                                     int cap = kDefaultEnumerationCap);

/// Realizability of a candidate k-tuple: sum k_i = n, k_1 >= 1 for n >= 1,
/// and no particle creates before being created.
bool is_realizable(const std::vector<int>& k);

/// All realizable partially ordered trees of order n, lexicographic.
std::vector<PartialTree> enumerate_partial(int n,
                                           int cap = kDefaultEnumerationCap);

/// Offsets K_i = 1 + sum_{l<i} k_l (K_1 = 1).
std::vector<int> offsets(const PartialTree& k);

/// Parent assignment induced by the offset naming. Throws InvalidTreeError on
/// unrealizable input.
ParentMap parent_map(const PartialTree& k);

/// The equivalence class of a fully ordered tree (j = 1): the partially
/// ordered tree with the same shape, preserving same-parent birth order.
PartialTree class_of(const FullTree& r);

/// Number of fully ordered trees in the class of k: linear extensions of the
/// creation-time partial order, counted by backtracking.
std::uint64_t class_size(const PartialTree& k);

struct TreeCounts {
  std::uint64_t full = 0;
  std::uint64_t partial = 0;
};

/// (n!, |K_n|), both by enumeration.
TreeCounts count_bound_check(int n, int cap = kDefaultEnumerationCap);

}  // namespace enskog
