#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smt_analogy/dag.hpp"
#include "smt_analogy/random.hpp"
#include "smt_analogy/vocab.hpp"

namespace smt_analogy {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenParams {
  int depth_min = 2;
  int depth_max = 7;
  int branch_min = 1;
  int branch_max = 3;
  int max_target_nodes = 20;
  int max_base_nodes = 8;
  double distractor = 0.3;
  double relabel = 0.5;
  // Chance that a leaf slot reuses an already created entity instead of a fresh one.
  double entity_share = 0.4;
  int pairs_per_dag = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

using Correspondence = std::pair<NodeId, NodeId>;  // (base id, target id)

struct AnalogyInstance {
  std::string id;
  SmtDag base;
  SmtDag target;
  std::optional<std::vector<Correspondence>> gold;
};

/// Throws std::invalid_argument if gold pairs are out of range or not one-to-one.
void validate_instance(const AnalogyInstance& instance);

struct OrderPair {
  SmtDag query;
  NodeId query_root = 0;
  SmtDag anchor;
  NodeId anchor_root = 0;
  bool positive = false;
};

/// Random SMT DAG whose height is drawn uniformly from the depth range.
SmtDag generate_dag(const GenParams& params, const SyntheticVocabulary& vocab, std::uint64_t seed);

/// Planted analogy: the target is a generated DAG plus distractor
/// expressions; the base is a permuted, optionally relabeled copy of one of
/// the target's rooted sub-DAGs, and gold records the planted injection.
AnalogyInstance sample_analogy_pair(const GenParams& params, const SyntheticVocabulary& vocab, std::uint64_t seed);

/// `params.pairs_per_dag` planted pairs sharing one target; the first equals
/// sample_analogy_pair with the same seed.
std::vector<AnalogyInstance> sample_analogy_pairs(const GenParams& params, const SyntheticVocabulary& vocab,
                                                  std::uint64_t seed);

struct OrderPairOptions {
  int n_pos = 0;
  int n_neg = 0;
  int hops = 3;
  std::uint64_t seed = 0;
  int max_attempts_per_pair = 200;
};

/// Positive and negative training pairs for the order embedding. Anchors are
/// stored as their `hops`-hop view around the root (root id 0); labels are
/// checked with is_rooted_subgraph before being emitted.
std::vector<OrderPair> sample_order_pairs(const std::vector<SmtDag>& corpus, const OrderPairOptions& options);

/// Deterministic uniform split; the first part holds round(fraction * n)
/// items. Relative order is preserved inside each part.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_corpus(const std::vector<T>& items, double fraction,
                                                       std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split_corpus: fraction must lie in (0, 1)");
  std::vector<std::size_t> index(items.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  Rng rng(seed);
  rng.shuffle(index);
  const auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(items.size())));
  std::vector<char> chosen(items.size(), 0);
  for (std::size_t i = 0; i < take; ++i) chosen[index[i]] = 1;
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i = 0; i < items.size(); ++i) (chosen[i] ? out.first : out.second).push_back(items[i]);
  return out;
}

}  // namespace smt_analogy
