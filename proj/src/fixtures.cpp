#include "smt_analogy/fixtures.hpp"

namespace smt_analogy {

AnalogyInstance rutherford_instance() {
  using K = NodeKind;
  SmtDag base("atom",
              {{0, K::Entity, "nucleus"},
               {1, K::Entity, "electron"},
               {2, K::Function, "mass"},
               {3, K::Function, "mass"},
               {4, K::Relation, "attracts"},
               {5, K::Relation, "revolve"},
               {6, K::Relation, "hotter"},
               {7, K::Relation, "cause"},
               {8, K::Relation, "greater"}},
              {{4, 0, 0}, {4, 1, 1}, {5, 1, 0}, {5, 0, 1}, {6, 0, 0}, {6, 1, 1}, {7, 8, 0}, {7, 5, 1}, {8, 2, 0}, {8, 3, 1}});
  SmtDag target("solar_system",
                {{0, K::Entity, "sun"},
                 {1, K::Entity, "planet"},
                 {2, K::Function, "weight"},
                 {3, K::Function, "mass"},
                 {4, K::Function, "temperature"},
                 {5, K::Function, "temperature"},
                 {6, K::Relation, "attracts"},
                 {7, K::Relation, "revolve"},
                 {8, K::Relation, "greater"},
                 {9, K::Relation, "greater"},
                 {10, K::Relation, "cause"}},
                {{6, 0, 0}, {6, 1, 1}, {7, 1, 0}, {7, 0, 1}, {8, 2, 0}, {8, 3, 1}, {9, 4, 0}, {9, 5, 1}, {10, 8, 0},
                 {10, 7, 1}});
  require_valid(base);
  require_valid(target);
  return {"rutherford", std::move(base), std::move(target), std::nullopt};
}

SignatureVocab rutherford_vocabulary(std::uint64_t master_seed) {
  SignatureVocab vocab(master_seed);
  vocab.add_group({"mass", "weight"});
  return vocab;
}

}  // namespace smt_analogy
