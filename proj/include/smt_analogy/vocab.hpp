#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smt_analogy/dag.hpp"

namespace smt_analogy {

/// Deterministic signature embeddings. Each synonym group owns a seeded unit
/// anchor; member tokens add a small seeded perturbation orthogonal to it.
/// Tokens outside every group behave as singleton groups.
class SignatureVocab {
 public:
  static constexpr int kDefaultDim = 32;
  // Perturbation norm relative to the anchor. Keeps in-group cosine at or
  // above (1 - s^2) / (1 + s^2) = 0.923.
  static constexpr double kPerturbation = 0.2;

  explicit SignatureVocab(std::uint64_t master_seed = 0, int dim = kDefaultDim);

  /// Adds a group; throws std::invalid_argument if a token is already grouped.
  void add_group(const std::vector<std::string>& tokens);

  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::vector<std::string>>& groups() const { return groups_; }

  /// Group index, if the token belongs to one.
  std::optional<int> group_of(const std::string& token) const;
  bool same_group(const std::string& a, const std::string& b) const;

  Eigen::VectorXd embed(const std::string& token) const;

 private:
  Eigen::VectorXd seeded_unit(std::uint64_t stream) const;

  std::uint64_t seed_;
  int dim_;
  std::vector<std::vector<std::string>> groups_;
  std::map<std::string, int> group_index_;
};

/// Vocabulary used by the synthetic generator: relation, function and entity
/// token families, each organized in synonym triples.
struct SyntheticVocabulary {
  SignatureVocab vocab;
  std::vector<std::vector<std::string>> relation_groups;
  std::vector<std::vector<std::string>> function_groups;
  std::vector<std::vector<std::string>> entity_groups;
};

SyntheticVocabulary make_synthetic_vocabulary(std::uint64_t master_seed = 0, int dim = SignatureVocab::kDefaultDim,
                                              int relation_groups = 12, int function_groups = 10,
                                              int entity_groups = 16, int group_size = 3);

inline constexpr int feature_dim(int signature_dim) { return kNodeKindCount + signature_dim; }

/// [one-hot kind ; unit signature embedding].
Eigen::VectorXd node_features(const SmtNode& node, const SignatureVocab& vocab);

/// One row per node, in id order.
Eigen::MatrixXd feature_matrix(const SmtDag& dag, const SignatureVocab& vocab);

}  // namespace smt_analogy
