#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace smt_analogy {

using NodeId = int;

enum class NodeKind : std::uint8_t { Entity = 0, Function = 1, Relation = 2 };

inline constexpr int kNodeKindCount = 3;

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

struct SmtNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Entity;
  std::string signature;

  bool operator==(const SmtNode&) const = default;
};

/// Directed edge from an expression to one of its arguments; `pos` is the
/// argument slot.
struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  int pos = 0;

  bool operator==(const Edge&) const = default;
};

struct ChildRef {
  NodeId node = 0;
  int pos = 0;
};

/// Vertex-labeled DAG of SMT expressions. Construction never throws on
/// malformed structure; call validate_dag to list violations. Adjacency is
/// cached at construction, children sorted by position.
class SmtDag {
 public:
  SmtDag() = default;
  SmtDag(std::string id, std::vector<SmtNode> nodes, std::vector<Edge> edges);

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<SmtNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const SmtNode& node(NodeId v) const { return nodes_.at(static_cast<std::size_t>(v)); }
  NodeKind kind(NodeId v) const { return node(v).kind; }

  /// Children of v ordered by argument position.
  const std::vector<ChildRef>& children(NodeId v) const { return children_.at(static_cast<std::size_t>(v)); }
  const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(static_cast<std::size_t>(v)); }
  int arity(NodeId v) const { return static_cast<int>(children(v).size()); }

  /// Child at argument slot `pos`, if any.
  std::optional<NodeId> child_at(NodeId v, int pos) const;

  bool contains(NodeId v) const { return v >= 0 && v < size(); }

  bool operator==(const SmtDag& other) const {
    return id_ == other.id_ && nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::string id_;
  std::vector<SmtNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<ChildRef>> children_;
  std::vector<std::vector<NodeId>> parents_;
};

struct Violation {
  enum class Code {
    NonDenseIds,
    EmptySignature,
    DanglingEdge,
    SelfLoop,
    DuplicateEdge,
    Cycle,
    EntityNotLeaf,
    BadPositions,
  };
  Code code;
  std::vector<int> where;  // node ids, or (src, dst, pos) for edge violations
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_dag(const SmtDag& dag);
bool is_valid(const SmtDag& dag);

/// Throws std::invalid_argument listing the first violation.
void require_valid(const SmtDag& dag);

/// Parents-before-children order. Throws std::invalid_argument on a cycle.
std::vector<NodeId> topological_order(const SmtDag& dag);

/// Height of every node: longest path to a leaf, in edges.
std::vector<int> node_heights(const SmtDag& dag);

struct RootedSubgraph {
  SmtDag dag;
  std::vector<NodeId> old_to_new;  // -1 for nodes outside the extraction
  std::vector<NodeId> new_to_old;
};

/// Sub-DAG on everything reachable from `root` within `hops` directed
/// steps. The root becomes id 0; remaining ids follow BFS order. Edges are
/// induced, except that a frontier node whose arguments are only partly
/// inside keeps none of them, so the result always validates.
RootedSubgraph k_hop_rooted_subgraph(const SmtDag& dag, NodeId root, int hops);

/// All descendants of `root` (the closure), as a rooted subgraph.
RootedSubgraph descendant_closure(const SmtDag& dag, NodeId root);

Eigen::MatrixXd adjacency_matrix(const SmtDag& dag);

/// Renumbers nodes so that old id v becomes perm[v]. Edge order is kept.
SmtDag permute_nodes(const SmtDag& dag, const std::vector<NodeId>& perm);

struct SubgraphMatchOptions {
  // Treat Function arguments as an unordered multiset instead of slots.
  bool unordered_functions = false;
};

/// True iff `small` rooted at `root_small` embeds injectively into `big`
/// rooted at `root_big`, preserving edges, argument positions and node
/// kinds; only Relation signatures must match exactly.
bool is_rooted_subgraph(const SmtDag& small, NodeId root_small, const SmtDag& big, NodeId root_big,
                        const SubgraphMatchOptions& options = {});

}  // namespace smt_analogy
