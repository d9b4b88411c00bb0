#include <doctest.h>

#include <algorithm>

#include "smt_analogy/fixtures.hpp"
#include "smt_analogy/oracle.hpp"
#include "support.hpp"

using namespace smt_analogy;

namespace {

const SyntheticVocabulary& vocab() {
  static const auto v = make_synthetic_vocabulary(0);
  return v;
}

BinaryAlignment matrix_of(const AnalogyInstance& inst, const Mapping& m) {
  return to_matrix(m, inst.base.size(), inst.target.size());
}

std::vector<NodeId> image_of(const AnalogyInstance& inst, const Mapping& m) {
  std::vector<NodeId> image(static_cast<std::size_t>(inst.base.size()), -1);
  for (const auto& [b, t] : m) image[static_cast<std::size_t>(b)] = t;
  return image;
}

}  // namespace

TEST_CASE("rutherford: greater with its arguments is consistent") {
  const auto inst = rutherford_instance();
  const auto r = verify_alignment(inst.base, inst.target, matrix_of(inst, {{2, 2}, {3, 3}, {8, 8}}));
  CHECK(r.all_rules());
  CHECK(r.correspondence_count == 3);
  CHECK(r.systematicity_score == 4.0);
}

TEST_CASE("rutherford: rule violations are reported") {
  const auto inst = rutherford_instance();

  auto x = matrix_of(inst, {{0, 0}, {1, 0}});
  auto r = verify_alignment(inst.base, inst.target, x);
  CHECK_FALSE(r.one_to_one);
  CHECK(r.target_violations == std::vector<NodeId>{0});

  r = verify_alignment(inst.base, inst.target, matrix_of(inst, {{0, 0}, {1, 1}, {4, 10}}));
  CHECK_FALSE(r.tiered_identicality);
  CHECK(r.identicality_violations == std::vector<Correspondence>{{4, 10}});

  // A matched expression whose arguments are unmatched.
  r = verify_alignment(inst.base, inst.target, matrix_of(inst, {{8, 8}}));
  CHECK_FALSE(r.parallel_connectivity);
  CHECK_FALSE(r.connectivity_violations.empty());

  // Arguments swapped against the slots.
  r = verify_alignment(inst.base, inst.target, matrix_of(inst, {{0, 1}, {1, 0}, {4, 6}}));
  CHECK_FALSE(r.parallel_connectivity);

  CHECK_THROWS_AS(verify_alignment(inst.base, inst.target, BinaryAlignment::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("rutherford: best structure map") {
  const auto inst = rutherford_instance();
  const auto sm = exact_structure_map(inst.base, inst.target);
  const Mapping expected{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 6}, {5, 7}, {7, 10}, {8, 8}};
  CHECK(sm.best == expected);
  CHECK(sm.best_count == 8);
  CHECK(sm.best_score == 13.0);
  CHECK(std::find(sm.best.begin(), sm.best.end(), Correspondence{8, 9}) == sm.best.end());
  CHECK(best_structure_map(inst.base, inst.target) == sm.best);
  CHECK(verify_alignment(inst.base, inst.target, matrix_of(inst, sm.best)).all_rules());
  CHECK_FALSE(can_extend(inst.base, inst.target, sm.best));

  const auto brute = testing::brute_force_best(inst.base, inst.target);
  CHECK(brute.count == 8);
  CHECK(brute.score == 13);
}

TEST_CASE("systematicity score examples") {
  const auto inst = rutherford_instance();
  CHECK(systematicity_score(inst.target, {}) == 0.0);
  CHECK(systematicity_score(inst.target, {{0, 0}}) == 1.0);
  CHECK(systematicity_score(inst.target, {{7, 10}}) == 3.0);
  CHECK(systematicity_score(inst.target, {{4, 6}, {5, 7}}) == 4.0);
  const auto chain = testing::chain3();
  CHECK(systematicity_score(chain, {{0, 0}, {1, 1}, {2, 2}}) == 6.0);
  CHECK(systematicity_score(chain, {{2, 2}}) == 1.0);
}

TEST_CASE("signature compatibility") {
  const SmtNode r1{0, NodeKind::Relation, "cause"};
  const SmtNode r2{0, NodeKind::Relation, "enable"};
  const SmtNode e1{0, NodeKind::Entity, "sun"};
  const SmtNode e2{0, NodeKind::Entity, "nucleus"};
  const SmtNode f1{0, NodeKind::Function, "mass"};
  const SmtNode f2{0, NodeKind::Function, "weight"};
  CHECK(signatures_compatible(r1, r1));
  CHECK_FALSE(signatures_compatible(r1, r2));
  CHECK(signatures_compatible(e1, e2));
  CHECK_FALSE(signatures_compatible(e1, f1));

  const auto rv = rutherford_vocabulary();
  OracleOptions strict{true, &rv};
  CHECK(signatures_compatible(f1, f2, strict));
  CHECK_FALSE(signatures_compatible(e1, e2, strict));
  OracleOptions strict_no_vocab{true, nullptr};
  CHECK_FALSE(signatures_compatible(f1, f2, strict_no_vocab));
  CHECK(signatures_compatible(f1, f1, strict_no_vocab));
}

TEST_CASE("a graph maps onto itself bijectively") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_dag(testing::small_params(), vocab(), seed);
    const auto best = best_structure_map(g, g);
    CHECK(static_cast<int>(best.size()) == g.size());
    const auto heights = node_heights(g);
    double full = 0.0;
    for (int h : heights) full += 1 + h;
    CHECK(systematicity_score(g, best) == full);
  }
}

TEST_CASE("oracle agrees with brute force on small instances") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto inst = sample_analogy_pair(testing::small_params(), vocab(), seed);
    const auto sm = exact_structure_map(inst.base, inst.target);
    const auto brute = testing::brute_force_best(inst.base, inst.target);
    CHECK(sm.best_count == brute.count);
    CHECK(sm.best_score == static_cast<double>(brute.score));
    CHECK(testing::brute_rules_hold(inst.base, inst.target, image_of(inst, sm.best)));
    // Planted gold is a full injection, so the best map covers the base.
    CHECK(sm.best_count == inst.base.size());
    CHECK(std::is_sorted(sm.best.begin(), sm.best.end()));
  }
}

TEST_CASE("maximal mappings are consistent and cannot be extended") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = sample_analogy_pair(testing::small_params(), vocab(), seed);
    const auto sm = exact_structure_map(inst.base, inst.target);
    CHECK_FALSE(sm.maximal.empty());
    for (const auto& m : sm.maximal) {
      CHECK(verify_alignment(inst.base, inst.target, matrix_of(inst, m)).all_rules());
      if (!sm.truncated) CHECK_FALSE(can_extend(inst.base, inst.target, m));
      CHECK(static_cast<int>(m.size()) <= sm.best_count);
    }
  }
}

TEST_CASE("oracle is deterministic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = sample_analogy_pair(GenParams{}, vocab(), seed);
    const auto a = exact_structure_map(inst.base, inst.target);
    const auto b = exact_structure_map(inst.base, inst.target);
    CHECK(a.best == b.best);
    CHECK(a.maximal == b.maximal);
  }
}

TEST_CASE("strict synonyms respect the vocabulary") {
  OracleOptions strict{true, &vocab().vocab};
  GenParams p = testing::small_params();
  p.relabel = 1.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = sample_analogy_pair(p, vocab(), seed);
    const auto best = best_structure_map(inst.base, inst.target, {}, strict);
    CHECK(static_cast<int>(best.size()) == inst.base.size());
    for (const auto& [b, t] : best) CHECK(signatures_compatible(inst.base.node(b), inst.target.node(t), strict));
  }
}

TEST_CASE("size limits") {
  const auto inst = rutherford_instance();
  StructureMapLimits tight;
  tight.max_base = 5;
  CHECK_THROWS_AS(exact_structure_map(inst.base, inst.target, tight), SizeLimitError);
  tight = {};
  tight.max_target = 10;
  CHECK_THROWS_AS(best_structure_map(inst.base, inst.target, tight), SizeLimitError);
  tight = {};
  tight.max_mappings = 1;
  const auto sm = exact_structure_map(inst.base, inst.target, tight);
  CHECK(sm.maximal.size() <= 1);
  CHECK(sm.best_count == 8);
}
