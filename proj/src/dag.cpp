#include "smt_analogy/dag.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace smt_analogy {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Entity:
      return "entity";
    case NodeKind::Function:
      return "function";
    case NodeKind::Relation:
      return "relation";
  }
  return "entity";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  if (text == "entity") return NodeKind::Entity;
  if (text == "function") return NodeKind::Function;
  if (text == "relation") return NodeKind::Relation;
  return std::nullopt;
}

SmtDag::SmtDag(std::string id, std::vector<SmtNode> nodes, std::vector<Edge> edges)
    : id_(std::move(id)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const auto n = nodes_.size();
  children_.assign(n, {});
  parents_.assign(n, {});
  for (const auto& e : edges_) {
    if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= n || static_cast<std::size_t>(e.dst) >= n)
      continue;  // reported by validate_dag
    children_[static_cast<std::size_t>(e.src)].push_back({e.dst, e.pos});
    parents_[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }
  for (auto& kids : children_) {
    std::stable_sort(kids.begin(), kids.end(), [](const ChildRef& a, const ChildRef& b) { return a.pos < b.pos; });
  }
  for (auto& ps : parents_) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  }
}

std::optional<NodeId> SmtDag::child_at(NodeId v, int pos) const {
  const auto& kids = children(v);
  // Positions are dense on valid graphs, so the slot index is the position.
  if (pos >= 0 && pos < static_cast<int>(kids.size()) && kids[static_cast<std::size_t>(pos)].pos == pos)
    return kids[static_cast<std::size_t>(pos)].node;
  for (const auto& c : kids)
    if (c.pos == pos) return c.node;
  return std::nullopt;
}

namespace {

std::string describe_edge(const Edge& e) {
  std::ostringstream out;
  out << e.src << "->" << e.dst << "@" << e.pos;
  return out.str();
}

// Kahn's algorithm; returns the order and whether it covers every node.
std::pair<std::vector<NodeId>, bool> kahn_order(const SmtDag& dag) {
  const int n = dag.size();
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v)
    for (const auto& c : dag.children(v)) ++indegree[static_cast<std::size_t>(c.node)];
  std::deque<NodeId> ready;
  for (int v = 0; v < n; ++v)
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  std::vector<NodeId> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    const NodeId v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (const auto& c : dag.children(v))
      if (--indegree[static_cast<std::size_t>(c.node)] == 0) ready.push_back(c.node);
  }
  const bool complete = static_cast<int>(order.size()) == n;
  return {std::move(order), complete};
}

}  // namespace

ValidationReport validate_dag(const SmtDag& dag) {
  ValidationReport report;
  const int n = dag.size();

  for (int i = 0; i < n; ++i) {
    const auto& node = dag.nodes()[static_cast<std::size_t>(i)];
    if (node.id != i)
      report.push_back({Violation::Code::NonDenseIds, {i, node.id},
                        "node at index " + std::to_string(i) + " carries id " + std::to_string(node.id)});
    if (node.signature.empty())
      report.push_back({Violation::Code::EmptySignature, {i}, "node " + std::to_string(i) + " has an empty signature"});
  }

  std::set<std::tuple<int, int, int>> seen;
  bool dangling = false;
  for (const auto& e : dag.edges()) {
    if (!dag.contains(e.src) || !dag.contains(e.dst) || e.pos < 0) {
      report.push_back({Violation::Code::DanglingEdge, {e.src, e.dst, e.pos}, "edge " + describe_edge(e) + " is out of range"});
      dangling = true;
      continue;
    }
    if (e.src == e.dst)
      report.push_back({Violation::Code::SelfLoop, {e.src, e.dst, e.pos}, "self-loop " + describe_edge(e)});
    if (!seen.insert({e.src, e.dst, e.pos}).second)
      report.push_back({Violation::Code::DuplicateEdge, {e.src, e.dst, e.pos}, "duplicate edge " + describe_edge(e)});
  }

  // Self-loops are already reported; the cycle check looks for longer cycles.
  {
    std::vector<Edge> kept;
    for (const auto& e : dag.edges())
      if (dag.contains(e.src) && dag.contains(e.dst) && e.src != e.dst) kept.push_back(e);
    std::vector<SmtNode> nodes = dag.nodes();
    SmtDag stripped("", std::move(nodes), std::move(kept));
    auto [order, complete] = kahn_order(stripped);
    if (!complete) {
      std::vector<char> placed(static_cast<std::size_t>(n), 0);
      for (NodeId v : order) placed[static_cast<std::size_t>(v)] = 1;
      std::vector<int> stuck;
      for (int v = 0; v < n; ++v)
        if (!placed[static_cast<std::size_t>(v)]) stuck.push_back(v);
      report.push_back({Violation::Code::Cycle, stuck, "edge relation is cyclic"});
    }
  }

  for (int v = 0; v < n; ++v) {
    const auto& kids = dag.children(v);
    if (dag.kind(v) == NodeKind::Entity && !kids.empty())
      report.push_back({Violation::Code::EntityNotLeaf, {v}, "entity " + std::to_string(v) + " must be a leaf"});
    std::vector<int> positions;
    for (const auto& c : kids) positions.push_back(c.pos);
    std::sort(positions.begin(), positions.end());
    bool dense = true;
    for (std::size_t p = 0; p < positions.size(); ++p) dense = dense && positions[p] == static_cast<int>(p);
    if (!dense)
      report.push_back({Violation::Code::BadPositions, {v},
                        "outgoing positions of node " + std::to_string(v) + " are not 0..arity-1"});
  }
  (void)dangling;
  return report;
}

bool is_valid(const SmtDag& dag) { return validate_dag(dag).empty(); }

void require_valid(const SmtDag& dag) {
  const auto report = validate_dag(dag);
  if (!report.empty())
    throw std::invalid_argument("invalid DAG '" + dag.id() + "': " + report.front().message);
}

std::vector<NodeId> topological_order(const SmtDag& dag) {
  auto [order, complete] = kahn_order(dag);
  if (!complete) throw std::invalid_argument("topological_order: graph '" + dag.id() + "' is cyclic");
  return order;
}

std::vector<int> node_heights(const SmtDag& dag) {
  const auto order = topological_order(dag);
  std::vector<int> height(static_cast<std::size_t>(dag.size()), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int h = 0;
    for (const auto& c : dag.children(*it)) h = std::max(h, height[static_cast<std::size_t>(c.node)] + 1);
    height[static_cast<std::size_t>(*it)] = h;
  }
  return height;
}

namespace {

RootedSubgraph extract(const SmtDag& dag, NodeId root, int hops) {
  if (!dag.contains(root))
    throw std::out_of_range("k_hop_rooted_subgraph: unknown root " + std::to_string(root));
  RootedSubgraph out;
  out.old_to_new.assign(static_cast<std::size_t>(dag.size()), -1);
  std::vector<int> dist(static_cast<std::size_t>(dag.size()), -1);
  std::deque<NodeId> queue{root};
  dist[static_cast<std::size_t>(root)] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    out.old_to_new[static_cast<std::size_t>(v)] = static_cast<NodeId>(out.new_to_old.size());
    out.new_to_old.push_back(v);
    if (dist[static_cast<std::size_t>(v)] >= hops) continue;
    for (const auto& c : dag.children(v)) {
      if (dist[static_cast<std::size_t>(c.node)] >= 0) continue;
      dist[static_cast<std::size_t>(c.node)] = dist[static_cast<std::size_t>(v)] + 1;
      queue.push_back(c.node);
    }
  }

  std::vector<SmtNode> nodes;
  nodes.reserve(out.new_to_old.size());
  for (std::size_t i = 0; i < out.new_to_old.size(); ++i) {
    SmtNode node = dag.node(out.new_to_old[i]);
    node.id = static_cast<NodeId>(i);
    nodes.push_back(std::move(node));
  }
  // A frontier node keeps its out-edges only if every argument made it in;
  // a partial argument list would leave a gap in the positions.
  auto complete = [&](NodeId v) {
    for (const auto& c : dag.children(v))
      if (out.old_to_new[static_cast<std::size_t>(c.node)] < 0) return false;
    return true;
  };
  std::vector<Edge> edges;
  for (const auto& e : dag.edges()) {
    const NodeId s = out.old_to_new[static_cast<std::size_t>(e.src)];
    const NodeId d = out.old_to_new[static_cast<std::size_t>(e.dst)];
    if (s >= 0 && d >= 0 && complete(e.src)) edges.push_back({s, d, e.pos});
  }
  out.dag = SmtDag(dag.id(), std::move(nodes), std::move(edges));
  return out;
}

}  // namespace

RootedSubgraph k_hop_rooted_subgraph(const SmtDag& dag, NodeId root, int hops) {
  if (hops < 1) throw std::invalid_argument("k_hop_rooted_subgraph: hops must be positive");
  return extract(dag, root, hops);
}

RootedSubgraph descendant_closure(const SmtDag& dag, NodeId root) {
  return extract(dag, root, std::max(1, dag.size()));
}

Eigen::MatrixXd adjacency_matrix(const SmtDag& dag) {
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(dag.size(), dag.size());
  for (const auto& e : dag.edges()) adj(e.src, e.dst) = 1.0;
  return adj;
}

SmtDag permute_nodes(const SmtDag& dag, const std::vector<NodeId>& perm) {
  if (static_cast<int>(perm.size()) != dag.size()) throw std::invalid_argument("permute_nodes: size mismatch");
  std::vector<SmtNode> nodes(perm.size());
  for (int v = 0; v < dag.size(); ++v) {
    SmtNode node = dag.node(v);
    node.id = perm[static_cast<std::size_t>(v)];
    nodes.at(static_cast<std::size_t>(node.id)) = std::move(node);
  }
  std::vector<Edge> edges;
  edges.reserve(dag.edges().size());
  for (const auto& e : dag.edges())
    edges.push_back({perm[static_cast<std::size_t>(e.src)], perm[static_cast<std::size_t>(e.dst)], e.pos});
  return SmtDag(dag.id(), std::move(nodes), std::move(edges));
}

namespace {

class SubgraphMatcher {
 public:
  SubgraphMatcher(const SmtDag& small, const SmtDag& big, const SubgraphMatchOptions& options)
      : small_(small), big_(big), options_(options) {
    map_.assign(static_cast<std::size_t>(small.size()), -1);
    used_.assign(static_cast<std::size_t>(big.size()), 0);
    for (const auto& e : big.edges()) ++big_edge_count_[{e.src, e.dst}];
    for (const auto& e : small.edges()) ++small_edge_count_[{e.src, e.dst}];
  }

  bool run(NodeId root_small, NodeId root_big) {
    // Parents first, starting from the root, then anything unreachable.
    order_ = topological_order(small_);
    std::stable_partition(order_.begin(), order_.end(), [&](NodeId v) { return v == root_small; });
    if (!compatible(root_small, root_big)) return false;
    assign(root_small, root_big);
    return search(1);
  }

 private:
  bool compatible(NodeId s, NodeId b) const {
    if (used_[static_cast<std::size_t>(b)]) return false;
    if (small_.kind(s) != big_.kind(b)) return false;
    if (small_.kind(s) == NodeKind::Relation && small_.node(s).signature != big_.node(b).signature) return false;
    if (small_.arity(s) > big_.arity(b)) return false;
    return true;
  }

  bool unordered(NodeId small_parent) const {
    return options_.unordered_functions && small_.kind(small_parent) == NodeKind::Function;
  }

  // Every edge between s and an already-mapped small node must exist in big.
  bool edges_consistent(NodeId s, NodeId b) const {
    for (const auto& c : small_.children(s)) {
      const NodeId mc = map_[static_cast<std::size_t>(c.node)];
      if (mc < 0 && c.node != s) continue;
      const NodeId target = c.node == s ? b : mc;
      if (!has_edge(s, b, c.node, target, c.pos)) return false;
    }
    for (NodeId p : small_.parents(s)) {
      const NodeId mp = map_[static_cast<std::size_t>(p)];
      if (mp < 0) continue;
      for (const auto& c : small_.children(p))
        if (c.node == s && !has_edge(p, mp, s, b, c.pos)) return false;
    }
    return true;
  }

  bool has_edge(NodeId small_src, NodeId big_src, NodeId small_dst, NodeId big_dst, int pos) const {
    if (unordered(small_src)) {
      const auto need = small_edge_count_.find({small_src, small_dst});
      const auto have = big_edge_count_.find({big_src, big_dst});
      return have != big_edge_count_.end() && need != small_edge_count_.end() && have->second >= need->second;
    }
    const auto child = big_.child_at(big_src, pos);
    return child && *child == big_dst;
  }

  void assign(NodeId s, NodeId b) {
    map_[static_cast<std::size_t>(s)] = b;
    used_[static_cast<std::size_t>(b)] = 1;
  }

  void unassign(NodeId s) {
    used_[static_cast<std::size_t>(map_[static_cast<std::size_t>(s)])] = 0;
    map_[static_cast<std::size_t>(s)] = -1;
  }

  std::vector<NodeId> candidates(NodeId s) const {
    std::vector<NodeId> out;
    for (NodeId p : small_.parents(s)) {
      const NodeId mp = map_[static_cast<std::size_t>(p)];
      if (mp < 0) continue;
      if (unordered(p)) {
        for (const auto& c : big_.children(mp)) out.push_back(c.node);
      } else {
        for (const auto& c : small_.children(p))
          if (c.node == s)
            if (auto child = big_.child_at(mp, c.pos)) out.push_back(*child);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    for (int b = 0; b < big_.size(); ++b) out.push_back(b);
    return out;
  }

  bool search(std::size_t depth) {
    if (depth == order_.size()) return true;
    const NodeId s = order_[depth];
    for (NodeId b : candidates(s)) {
      if (!compatible(s, b) || !edges_consistent(s, b)) continue;
      assign(s, b);
      if (search(depth + 1)) return true;
      unassign(s);
    }
    return false;
  }

  const SmtDag& small_;
  const SmtDag& big_;
  SubgraphMatchOptions options_;
  std::vector<NodeId> order_;
  std::vector<NodeId> map_;
  std::vector<char> used_;
  std::map<std::pair<NodeId, NodeId>, int> big_edge_count_;
  std::map<std::pair<NodeId, NodeId>, int> small_edge_count_;
};

}  // namespace

bool is_rooted_subgraph(const SmtDag& small, NodeId root_small, const SmtDag& big, NodeId root_big,
                        const SubgraphMatchOptions& options) {
  if (!small.contains(root_small) || !big.contains(root_big)) return false;
  SubgraphMatcher matcher(small, big, options);
  return matcher.run(root_small, root_big);
}

}  // namespace smt_analogy
