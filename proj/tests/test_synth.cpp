#include <doctest.h>

#include <map>

#include "smt_analogy/alignment.hpp"
#include "smt_analogy/io.hpp"
#include "smt_analogy/oracle.hpp"
#include "smt_analogy/synth.hpp"
#include "support.hpp"

using namespace smt_analogy;

namespace {

const SyntheticVocabulary& vocab() {
  static const auto v = make_synthetic_vocabulary(0);
  return v;
}

Eigen::MatrixXd as_double(const BinaryAlignment& x) { return x.cast<double>(); }

}  // namespace

TEST_CASE("GenParams validation") {
  GenParams p;
  CHECK_NOTHROW(p.validate());
  p.depth_min = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.depth_max = 11;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.depth_min = 5;
  p.depth_max = 4;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.branch_min = 3;
  p.branch_max = 2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("depth 1 with unit branching gives a two node chain") {
  GenParams p;
  p.depth_min = p.depth_max = 1;
  p.branch_min = p.branch_max = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_dag(p, vocab(), seed);
    REQUIRE(g.size() == 2);
    CHECK(g.edges() == std::vector<Edge>{{0, 1, 0}});
    CHECK(g.kind(0) != NodeKind::Entity);
    CHECK(g.kind(1) == NodeKind::Entity);
  }
}

TEST_CASE("generate_dag is deterministic and valid") {
  GenParams p;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = generate_dag(p, vocab(), seed);
    CHECK(a == generate_dag(p, vocab(), seed));
    CHECK(graph_to_json(a).dump() == graph_to_json(generate_dag(p, vocab(), seed)).dump());
    CHECK(validate_dag(a).empty());
    CHECK(a.size() <= p.max_target_nodes);
    for (NodeId v = 0; v < a.size(); ++v)
      if (a.arity(v) == 0) CHECK(a.kind(v) == NodeKind::Entity);
  }
}

TEST_CASE("sampled heights cover the whole depth range") {
  GenParams p;
  std::map<int, int> histogram;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto heights = node_heights(generate_dag(p, vocab(), seed));
    ++histogram[*std::max_element(heights.begin(), heights.end())];
  }
  for (int d = 2; d <= 7; ++d) CHECK(histogram[d] > 100);
  CHECK(histogram.size() == 6);
}

TEST_CASE("noise-free planting copies a target sub-DAG") {
  GenParams p;
  p.distractor = 0.0;
  p.relabel = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = sample_analogy_pair(p, vocab(), seed);
    REQUIRE(inst.gold);
    CHECK(static_cast<int>(inst.gold->size()) == inst.base.size());
    CHECK(inst.base.size() <= p.max_base_nodes);
    for (const auto& [b, t] : *inst.gold) CHECK(inst.base.node(b).signature == inst.target.node(t).signature);
    const auto x = as_double(to_matrix(*inst.gold, inst.base.size(), inst.target.size()));
    CHECK((x * adjacency_matrix(inst.target) * x.transpose() - adjacency_matrix(inst.base)).isZero(0.0));
    const auto heights = node_heights(inst.base);
    CHECK(*std::max_element(heights.begin(), heights.end()) >= 1);
  }
}

TEST_CASE("full relabeling stays inside synonym groups") {
  GenParams p;
  p.relabel = 1.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = sample_analogy_pair(p, vocab(), seed);
    for (const auto& [b, t] : *inst.gold) {
      const auto& bs = inst.base.node(b).signature;
      const auto& ts = inst.target.node(t).signature;
      if (inst.base.kind(b) == NodeKind::Relation) {
        CHECK(bs == ts);
      } else {
        CHECK(bs != ts);
        CHECK(vocab().vocab.same_group(bs, ts));
      }
    }
  }
}

TEST_CASE("planted gold satisfies every mapping rule") {
  GenParams p;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = sample_analogy_pair(p, vocab(), seed);
    CHECK_NOTHROW(validate_instance(inst));
    CHECK(validate_dag(inst.base).empty());
    CHECK(validate_dag(inst.target).empty());
    CHECK(inst.target.size() <= p.max_target_nodes);
    const auto report = verify_alignment(inst.base, inst.target, to_matrix(*inst.gold, inst.base.size(), inst.target.size()));
    CHECK(report.all_rules());
  }
}

TEST_CASE("several pairs per DAG share the target") {
  GenParams p;
  p.pairs_per_dag = 3;
  const auto pairs = sample_analogy_pairs(p, vocab(), 9);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[1].target == pairs[0].target);
  CHECK(pairs[2].target == pairs[0].target);
  CHECK(pairs[0].id != pairs[1].id);
  const auto first = sample_analogy_pair(p, vocab(), 9);
  CHECK(first.base == pairs[0].base);
  CHECK(first.gold == pairs[0].gold);
}

TEST_CASE("validate_instance rejects bad gold") {
  auto inst = sample_analogy_pair(GenParams{}, vocab(), 3);
  auto bad = inst;
  bad.gold->push_back(bad.gold->front());
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  bad = inst;
  bad.gold->push_back({0, 999});
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
}

TEST_CASE("order pairs carry correct labels") {
  GenParams p;
  std::vector<SmtDag> corpus;
  for (std::uint64_t seed = 0; seed < 20; ++seed) corpus.push_back(generate_dag(p, vocab(), seed));
  OrderPairOptions o{40, 40, 3, 5};
  const auto pairs = sample_order_pairs(corpus, o);
  REQUIRE(pairs.size() == 80);
  int pos = 0;
  for (const auto& pair : pairs) {
    pos += pair.positive;
    CHECK(is_rooted_subgraph(pair.query, pair.query_root, pair.anchor, pair.anchor_root) == pair.positive);
    CHECK(validate_dag(pair.query).empty());
    CHECK(validate_dag(pair.anchor).empty());
  }
  CHECK(pos == 40);

  const auto again = sample_order_pairs(corpus, o);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(again[i].query == pairs[i].query);
    CHECK(again[i].anchor == pairs[i].anchor);
    CHECK(again[i].positive == pairs[i].positive);
  }
}

TEST_CASE("order pair sampling fails loudly on a degenerate corpus") {
  std::vector<SmtDag> leaves{testing::single_entity("a"), testing::single_entity("b")};
  CHECK_THROWS_AS(sample_order_pairs(leaves, {2, 2, 3, 1, 20}), GenerationError);
  CHECK_THROWS_AS(sample_order_pairs({}, {2, 2, 3, 1}), std::invalid_argument);
}

TEST_CASE("split_corpus") {
  std::vector<int> items(10);
  std::iota(items.begin(), items.end(), 0);
  const auto [a, b] = split_corpus(items, 0.5, 1);
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);
  std::vector<int> merged = a;
  merged.insert(merged.end(), b.begin(), b.end());
  std::sort(merged.begin(), merged.end());
  CHECK(merged == items);

  // Two seeds agree on a 50/50 split of 100 items with probability 1/C(100,50).
  std::vector<int> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 0);
  CHECK(split_corpus(hundred, 0.5, 1).first != split_corpus(hundred, 0.5, 2).first);
  CHECK(split_corpus(hundred, 0.5, 1).first == split_corpus(hundred, 0.5, 1).first);
  CHECK_THROWS_AS(split_corpus(items, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_corpus(items, 1.0, 1), std::invalid_argument);
}
