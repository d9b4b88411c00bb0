#pragma once

// Small graph builders and brute-force reference implementations shared by
// the unit tests and the acceptance runner. Nothing here calls the code it
// is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "smt_analogy/dag.hpp"
#include "smt_analogy/synth.hpp"

namespace smt_analogy::testing {

inline SmtDag chain3() {
  return SmtDag("chain",
                {{0, NodeKind::Relation, "r"}, {1, NodeKind::Function, "f"}, {2, NodeKind::Entity, "e"}},
                {{0, 1, 0}, {1, 2, 0}});
}

inline SmtDag diamond() {
  return SmtDag("diamond",
                {{0, NodeKind::Relation, "r"},
                 {1, NodeKind::Function, "f"},
                 {2, NodeKind::Function, "g"},
                 {3, NodeKind::Entity, "e"}},
                {{0, 1, 0}, {0, 2, 1}, {1, 3, 0}, {2, 3, 0}});
}

inline SmtDag single_entity(const std::string& signature = "sun") {
  return SmtDag("single", {{0, NodeKind::Entity, signature}}, {});
}

// Longest path to a leaf by enumerating every downward path.
inline std::vector<int> brute_heights(const SmtDag& dag) {
  std::function<int(NodeId)> longest = [&](NodeId v) {
    int best = 0;
    for (const auto& e : dag.edges())
      if (e.src == v) best = std::max(best, 1 + longest(e.dst));
    return best;
  };
  std::vector<int> out;
  for (NodeId v = 0; v < dag.size(); ++v) out.push_back(longest(v));
  return out;
}

// Nodes within `hops` directed steps of root, by plain BFS over the edge list.
inline std::set<NodeId> bfs_nodes(const SmtDag& dag, NodeId root, int hops) {
  std::set<NodeId> seen{root};
  std::vector<NodeId> frontier{root};
  for (int h = 0; h < hops; ++h) {
    std::vector<NodeId> next;
    for (NodeId v : frontier)
      for (const auto& e : dag.edges())
        if (e.src == v && seen.insert(e.dst).second) next.push_back(e.dst);
    frontier = next;
  }
  return seen;
}

// Best one-to-one assignment weight by trying every injection of rows into
// columns (rows <= cols).
inline double brute_assignment_weight(const Eigen::MatrixXd& w) {
  const int rows = static_cast<int>(w.rows());
  const int cols = static_cast<int>(w.cols());
  std::vector<int> cols_idx(static_cast<std::size_t>(cols));
  std::iota(cols_idx.begin(), cols_idx.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<char> used(static_cast<std::size_t>(cols), 0);
  std::function<void(int, double)> go = [&](int r, double acc) {
    if (r == rows) {
      best = std::max(best, acc);
      return;
    }
    for (int c = 0; c < cols; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(c)] = 1;
      go(r + 1, acc + w(r, c));
      used[static_cast<std::size_t>(c)] = 0;
    }
  };
  go(0, 0.0);
  return best;
}

// Rule check written independently of the oracle module. Entity and
// Function signatures are free; kinds must agree; Relation signatures must
// be equal; every child of a matched base node must be matched to the
// child in the same slot of its partner.
inline bool brute_rules_hold(const SmtDag& base, const SmtDag& target, const std::vector<NodeId>& image) {
  std::set<NodeId> used;
  for (NodeId u = 0; u < base.size(); ++u) {
    const NodeId t = image[static_cast<std::size_t>(u)];
    if (t < 0) continue;
    if (!used.insert(t).second) return false;
    if (base.kind(u) != target.kind(t)) return false;
    if (base.kind(u) == NodeKind::Relation && base.node(u).signature != target.node(t).signature) return false;
  }
  for (const auto& e : base.edges()) {
    const NodeId t = image[static_cast<std::size_t>(e.src)];
    if (t < 0) continue;
    const NodeId c = image[static_cast<std::size_t>(e.dst)];
    bool found = false;
    for (const auto& f : target.edges())
      if (f.src == t && f.pos == e.pos && f.dst == c && c >= 0) found = true;
    if (!found) return false;
  }
  return true;
}

struct BruteBest {
  int count = 0;
  int score = 0;
};

// Maximum (count, score) over all rule-consistent partial injections.
// Exhaustive over every partial map with kind-compatible images; a branch is
// cut only when an edge between two already decided nodes is broken or when
// even matching every remaining node cannot reach the best count so far.
inline BruteBest brute_force_best(const SmtDag& base, const SmtDag& target) {
  const auto heights = brute_heights(target);
  const NodeId n = base.size();
  std::vector<NodeId> image(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(target.size()), 0);
  BruteBest best;
  auto slot_child = [&](NodeId t, int pos) {
    for (const auto& f : target.edges())
      if (f.src == t && f.pos == pos) return f.dst;
    return NodeId{-1};
  };
  // Edges whose endpoints are both decided once u is.
  auto consistent = [&](NodeId u) {
    for (const auto& e : base.edges()) {
      if (e.src != u && e.dst != u) continue;
      if (e.src > u || e.dst > u) continue;
      const NodeId t = image[static_cast<std::size_t>(e.src)];
      if (t < 0) continue;
      const NodeId c = image[static_cast<std::size_t>(e.dst)];
      if (c < 0 || slot_child(t, e.pos) != c) return false;
    }
    return true;
  };
  std::function<void(NodeId, int, int)> go = [&](NodeId u, int count, int score) {
    if (count + (n - u) < best.count) return;
    if (u == n) {
      if (!brute_rules_hold(base, target, image)) return;
      if (count > best.count || (count == best.count && score > best.score)) best = {count, score};
      return;
    }
    for (NodeId t = 0; t < target.size(); ++t) {
      if (used[static_cast<std::size_t>(t)] || target.kind(t) != base.kind(u)) continue;
      if (base.kind(u) == NodeKind::Relation && base.node(u).signature != target.node(t).signature) continue;
      image[static_cast<std::size_t>(u)] = t;
      used[static_cast<std::size_t>(t)] = 1;
      if (consistent(u)) go(u + 1, count + 1, score + 1 + heights[static_cast<std::size_t>(t)]);
      used[static_cast<std::size_t>(t)] = 0;
    }
    image[static_cast<std::size_t>(u)] = -1;
    if (consistent(u)) go(u + 1, count, score);
  };
  go(0, 0, 0);
  return best;
}

// Planted instance small enough for brute_force_best.
inline GenParams small_params() {
  GenParams p;
  p.depth_min = 1;
  p.depth_max = 3;
  p.max_target_nodes = 10;
  p.max_base_nodes = 6;
  return p;
}

}  // namespace smt_analogy::testing
