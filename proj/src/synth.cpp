#include "smt_analogy/synth.hpp"

#include <numeric>
#include <set>

namespace smt_analogy {

void GenParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("GenParams: " + what); };
  if (depth_min < 1 || depth_max > 10 || depth_min > depth_max) fail("depth range must lie within [1, 10]");
  if (branch_min < 1 || branch_min > branch_max) fail("branching range must be non-empty and positive");
  if (max_target_nodes < 2) fail("node-count cap must be at least 2");
  if (max_base_nodes < 2) fail("base node cap must be at least 2");
  if (!(distractor >= 0.0)) fail("distractor fraction must be non-negative");
  if (!(relabel >= 0.0 && relabel <= 1.0)) fail("relabel probability must lie in [0, 1]");
  if (!(entity_share >= 0.0 && entity_share <= 1.0)) fail("entity share must lie in [0, 1]");
  if (pairs_per_dag < 1) fail("pairs per DAG must be positive");
}

void validate_instance(const AnalogyInstance& instance) {
  if (!instance.gold) return;
  std::set<NodeId> base_seen, target_seen;
  for (const auto& [b, t] : *instance.gold) {
    if (!instance.base.contains(b) || !instance.target.contains(t))
      throw std::invalid_argument("instance '" + instance.id + "': gold pair references a missing node");
    if (!base_seen.insert(b).second || !target_seen.insert(t).second)
      throw std::invalid_argument("instance '" + instance.id + "': gold pairs are not one-to-one");
  }
}

namespace {

struct NodeBudgetExceeded {};

const std::string& pick_token(Rng& rng, const std::vector<std::vector<std::string>>& groups) {
  const auto& group = groups[rng.index(groups.size())];
  return group[rng.index(group.size())];
}

class DagBuilder {
 public:
  DagBuilder(const SyntheticVocabulary& vocab, Rng& rng, int cap) : vocab_(vocab), rng_(rng), cap_(cap) {}

  NodeId add_node(NodeKind kind, std::string signature) {
    if (static_cast<int>(nodes_.size()) >= cap_) throw NodeBudgetExceeded{};
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({id, kind, std::move(signature)});
    if (kind == NodeKind::Entity) entities_.push_back(id);
    return id;
  }

  NodeId fresh_entity() { return add_node(NodeKind::Entity, pick_token(rng_, vocab_.entity_groups)); }

  NodeId leaf(double share) {
    if (!entities_.empty() && rng_.bernoulli(share)) return entities_[rng_.index(entities_.size())];
    return fresh_entity();
  }

  NodeId internal_node() {
    const bool relation = rng_.bernoulli(0.5);
    return relation ? add_node(NodeKind::Relation, pick_token(rng_, vocab_.relation_groups))
                    : add_node(NodeKind::Function, pick_token(rng_, vocab_.function_groups));
  }

  // Grows an expression of exactly the requested height.
  NodeId grow(int height, int branch_min, int branch_max, double share) {
    if (height == 0) return leaf(share);
    const NodeId v = internal_node();
    const auto arity = static_cast<int>(rng_.uniform_int(branch_min, branch_max));
    for (int pos = 0; pos < arity; ++pos) {
      const int child_height = pos == 0 ? height - 1 : static_cast<int>(rng_.uniform_int(0, height - 1));
      const NodeId c = grow(child_height, branch_min, branch_max, share);
      edges_.push_back({v, c, pos});
    }
    return v;
  }

  void add_edge(NodeId src, NodeId dst, int pos) { edges_.push_back({src, dst, pos}); }

  int size() const { return static_cast<int>(nodes_.size()); }
  void set_cap(int cap) { cap_ = cap; }

  SmtDag build(std::string id) { return SmtDag(std::move(id), nodes_, edges_); }

 private:
  const SyntheticVocabulary& vocab_;
  Rng& rng_;
  int cap_;
  std::vector<SmtNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<NodeId> entities_;
};

constexpr int kGenerationRetries = 10;

SmtDag generate_with_cap(const GenParams& params, const SyntheticVocabulary& vocab, std::uint64_t seed, int cap) {
  params.validate();
  Rng depth_rng(derive_seed(seed, 0));
  const auto height = static_cast<int>(depth_rng.uniform_int(params.depth_min, params.depth_max));
  if (height + 1 > cap) throw GenerationError("generate_dag: node cap too small for the sampled depth");
  int branch_max = params.branch_max;
  for (int attempt = 0; attempt <= kGenerationRetries; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt) + 1));
    DagBuilder builder(vocab, rng, cap);
    try {
      builder.grow(height, params.branch_min, branch_max, params.entity_share);
      return builder.build("g" + std::to_string(seed));
    } catch (const NodeBudgetExceeded&) {
      branch_max = std::max(params.branch_min, branch_max - 1);
    }
  }
  throw GenerationError("generate_dag: node cap exceeded after " + std::to_string(kGenerationRetries) + " retries");
}

const std::vector<std::string>* group_for(const SyntheticVocabulary& vocab, const std::string& token) {
  const auto g = vocab.vocab.group_of(token);
  if (!g) return nullptr;
  return &vocab.vocab.groups()[static_cast<std::size_t>(*g)];
}

}  // namespace

SmtDag generate_dag(const GenParams& params, const SyntheticVocabulary& vocab, std::uint64_t seed) {
  return generate_with_cap(params, vocab, seed, params.max_target_nodes);
}

std::vector<AnalogyInstance> sample_analogy_pairs(const GenParams& params, const SyntheticVocabulary& vocab,
                                                  std::uint64_t seed) {
  params.validate();
  // Leave room for the distractor expressions inside the target cap.
  const int core_cap = std::max(
      params.depth_max + 1,
      static_cast<int>(std::floor(params.max_target_nodes / (1.0 + params.distractor))));
  SmtDag core = generate_with_cap(params, vocab, derive_seed(seed, 1), std::min(core_cap, params.max_target_nodes));

  Rng rng(derive_seed(seed, 2));
  std::vector<SmtNode> nodes = core.nodes();
  std::vector<Edge> edges = core.edges();
  const auto wanted = static_cast<int>(std::llround(params.distractor * core.size()));
  const int core_size = core.size();
  auto room = [&] { return static_cast<int>(nodes.size()) < params.max_target_nodes; };
  // Distractors are new expressions over existing nodes or fresh entities;
  // they only add parents, so every existing rooted sub-DAG is unchanged.
  while (static_cast<int>(nodes.size()) - core_size < wanted && room()) {
    const bool relation = rng.bernoulli(0.5);
    const auto v = static_cast<NodeId>(nodes.size());
    nodes.push_back({v, relation ? NodeKind::Relation : NodeKind::Function,
                     pick_token(rng, relation ? vocab.relation_groups : vocab.function_groups)});
    const auto arity = static_cast<int>(rng.uniform_int(params.branch_min, params.branch_max));
    for (int pos = 0; pos < arity; ++pos) {
      NodeId child;
      if (room() && rng.bernoulli(0.3)) {
        child = static_cast<NodeId>(nodes.size());
        nodes.push_back({child, NodeKind::Entity, pick_token(rng, vocab.entity_groups)});
      } else {
        child = static_cast<NodeId>(rng.index(static_cast<std::size_t>(v)));
      }
      edges.push_back({v, child, pos});
    }
  }
  const SmtDag target("t" + std::to_string(seed), std::move(nodes), std::move(edges));

  const auto heights = node_heights(target);
  std::vector<NodeId> roots;
  for (NodeId v = 0; v < target.size(); ++v) {
    if (heights[static_cast<std::size_t>(v)] < 1) continue;
    if (descendant_closure(target, v).dag.size() <= params.max_base_nodes) roots.push_back(v);
  }
  if (roots.empty()) throw GenerationError("sample_analogy_pair: no base root fits the base node cap");

  std::vector<AnalogyInstance> out;
  for (int k = 0; k < params.pairs_per_dag; ++k) {
    const std::string suffix = std::to_string(seed) + (k == 0 ? "" : "_" + std::to_string(k));
    Rng pick(derive_seed(seed, 3 + static_cast<std::uint64_t>(k)));
    const NodeId root = roots[pick.index(roots.size())];
    RootedSubgraph extracted = descendant_closure(target, root);

    std::vector<NodeId> perm(static_cast<std::size_t>(extracted.dag.size()));
    std::iota(perm.begin(), perm.end(), 0);
    pick.shuffle(perm);
    SmtDag base = permute_nodes(extracted.dag, perm);

    std::vector<SmtNode> base_nodes = base.nodes();
    for (auto& node : base_nodes) {
      if (node.kind == NodeKind::Relation) continue;
      if (!pick.bernoulli(params.relabel)) continue;
      const auto* group = group_for(vocab, node.signature);
      if (group == nullptr || group->size() < 2) continue;
      std::vector<std::string> others;
      for (const auto& t : *group)
        if (t != node.signature) others.push_back(t);
      node.signature = others[pick.index(others.size())];
    }
    base = SmtDag("b" + suffix, std::move(base_nodes), base.edges());

    std::vector<Correspondence> gold;
    for (std::size_t i = 0; i < perm.size(); ++i) gold.emplace_back(perm[i], extracted.new_to_old[i]);
    std::sort(gold.begin(), gold.end());

    out.push_back({"p" + suffix, std::move(base), target, std::move(gold)});
  }
  return out;
}

AnalogyInstance sample_analogy_pair(const GenParams& params, const SyntheticVocabulary& vocab, std::uint64_t seed) {
  GenParams single = params;
  single.pairs_per_dag = 1;
  return std::move(sample_analogy_pairs(single, vocab, seed).front());
}

namespace {

struct RootPick {
  std::size_t graph;
  NodeId root;
};

std::optional<RootPick> random_root(const std::vector<SmtDag>& corpus, Rng& rng) {
  for (int tries = 0; tries < 64; ++tries) {
    const std::size_t g = rng.index(corpus.size());
    if (corpus[g].size() == 0) continue;
    return RootPick{g, static_cast<NodeId>(rng.index(static_cast<std::size_t>(corpus[g].size())))};
  }
  return std::nullopt;
}

// Adds one edge to the query below depth `hops`: either a fresh entity leaf
// or an extra argument pointing at an existing non-ancestor node.
std::optional<SmtDag> perturb(const SmtDag& query, int hops, Rng& rng) {
  std::vector<int> depth(static_cast<std::size_t>(query.size()), -1);
  depth[0] = 0;
  for (NodeId v : topological_order(query))
    for (const auto& c : query.children(v))
      if (depth[static_cast<std::size_t>(v)] >= 0 &&
          (depth[static_cast<std::size_t>(c.node)] < 0 ||
           depth[static_cast<std::size_t>(c.node)] > depth[static_cast<std::size_t>(v)] + 1))
        depth[static_cast<std::size_t>(c.node)] = depth[static_cast<std::size_t>(v)] + 1;
  std::vector<NodeId> hosts;
  for (NodeId v = 0; v < query.size(); ++v)
    if (query.kind(v) != NodeKind::Entity && depth[static_cast<std::size_t>(v)] >= 0 &&
        depth[static_cast<std::size_t>(v)] < hops)
      hosts.push_back(v);
  if (hosts.empty()) return std::nullopt;
  const NodeId host = hosts[rng.index(hosts.size())];
  std::vector<SmtNode> nodes = query.nodes();
  std::vector<Edge> edges = query.edges();
  const int pos = query.arity(host);

  if (rng.bernoulli(0.5)) {
    // Existing target that is not an ancestor of the host (keeps it acyclic).
    std::vector<char> ancestor(static_cast<std::size_t>(query.size()), 0);
    std::vector<NodeId> stack{host};
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      if (ancestor[static_cast<std::size_t>(v)]) continue;
      ancestor[static_cast<std::size_t>(v)] = 1;
      for (NodeId p : query.parents(v)) stack.push_back(p);
    }
    std::vector<NodeId> targets;
    for (NodeId v = 0; v < query.size(); ++v)
      if (!ancestor[static_cast<std::size_t>(v)]) targets.push_back(v);
    if (!targets.empty()) {
      edges.push_back({host, targets[rng.index(targets.size())], pos});
      return SmtDag(query.id(), std::move(nodes), std::move(edges));
    }
  }
  std::string signature = "entity";
  for (const auto& n : nodes)
    if (n.kind == NodeKind::Entity) signature = n.signature;
  const auto leaf = static_cast<NodeId>(nodes.size());
  nodes.push_back({leaf, NodeKind::Entity, signature});
  edges.push_back({host, leaf, pos});
  return SmtDag(query.id(), std::move(nodes), std::move(edges));
}

}  // namespace

std::vector<OrderPair> sample_order_pairs(const std::vector<SmtDag>& corpus, const OrderPairOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("sample_order_pairs: empty corpus");
  if (options.hops < 1) throw std::invalid_argument("sample_order_pairs: hops must be positive");
  Rng rng(options.seed);
  // Roots range over every node, leaves included: base entities need
  // trained embeddings too.

  auto anchor_view = [&](const RootPick& pick) {
    return k_hop_rooted_subgraph(corpus[pick.graph], pick.root, options.hops).dag;
  };
  auto random_query = [&](const RootPick& pick) {
    const auto hops = static_cast<int>(rng.uniform_int(1, options.hops));
    return k_hop_rooted_subgraph(corpus[pick.graph], pick.root, hops).dag;
  };
  auto exhausted = [&](const char* what) {
    return GenerationError(std::string("sample_order_pairs: could not produce enough verified ") + what);
  };

  std::vector<OrderPair> pairs;
  pairs.reserve(static_cast<std::size_t>(options.n_pos + options.n_neg));
  for (int i = 0; i < options.n_pos; ++i) {
    const auto pick = random_root(corpus, rng);
    if (!pick) throw exhausted("positives");
    OrderPair pair{random_query(*pick), 0, anchor_view(*pick), 0, true};
    if (!is_rooted_subgraph(pair.query, 0, pair.anchor, 0)) throw std::logic_error("extraction is not a subgraph");
    pairs.push_back(std::move(pair));
  }

  const int n_random = options.n_neg / 2;
  for (int i = 0; i < options.n_neg; ++i) {
    const bool cross_graph = i < n_random;
    bool done = false;
    for (int attempt = 0; attempt < options.max_attempts_per_pair && !done; ++attempt) {
      const auto pick = random_root(corpus, rng);
      if (!pick) break;
      OrderPair pair;
      if (cross_graph) {
        const auto other = random_root(corpus, rng);
        if (!other) break;
        pair = OrderPair{random_query(*pick), 0, anchor_view(*other), 0, false};
      } else {
        auto perturbed = perturb(random_query(*pick), options.hops, rng);
        if (!perturbed) continue;
        pair = OrderPair{std::move(*perturbed), 0, anchor_view(*pick), 0, false};
      }
      if (is_rooted_subgraph(pair.query, 0, pair.anchor, 0)) continue;
      pairs.push_back(std::move(pair));
      done = true;
    }
    if (!done) throw exhausted("negatives");
  }
  return pairs;
}

}  // namespace smt_analogy
