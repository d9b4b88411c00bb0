#include "smt_analogy/vocab.hpp"

#include <stdexcept>

#include "smt_analogy/random.hpp"

namespace smt_analogy {

SignatureVocab::SignatureVocab(std::uint64_t master_seed, int dim) : seed_(master_seed), dim_(dim) {
  if (dim < 2) throw std::invalid_argument("SignatureVocab: dimension must be at least 2");
}

void SignatureVocab::add_group(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("SignatureVocab: empty synonym group");
  for (const auto& t : tokens)
    if (group_index_.count(t)) throw std::invalid_argument("SignatureVocab: token '" + t + "' already grouped");
  const int g = static_cast<int>(groups_.size());
  for (const auto& t : tokens) group_index_.emplace(t, g);
  groups_.push_back(tokens);
}

std::optional<int> SignatureVocab::group_of(const std::string& token) const {
  const auto it = group_index_.find(token);
  if (it == group_index_.end()) return std::nullopt;
  return it->second;
}

bool SignatureVocab::same_group(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  const auto ga = group_of(a);
  return ga && ga == group_of(b);
}

Eigen::VectorXd SignatureVocab::seeded_unit(std::uint64_t stream) const {
  Rng rng(derive_seed(seed_, stream));
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = rng.normal();
  return v.normalized();
}

Eigen::VectorXd SignatureVocab::embed(const std::string& token) const {
  // The anchor stream is keyed by the group's first token so that adding
  // unrelated groups never moves existing embeddings.
  const auto g = group_of(token);
  const std::string& anchor_key = g ? groups_[static_cast<std::size_t>(*g)].front() : token;
  const Eigen::VectorXd anchor = seeded_unit(stable_hash("anchor:" + anchor_key));

  Eigen::VectorXd noise = seeded_unit(stable_hash("token:" + token));
  noise -= noise.dot(anchor) * anchor;
  if (noise.norm() < 1e-12) return anchor;
  noise.normalize();
  return (anchor + kPerturbation * noise).normalized();
}

SyntheticVocabulary make_synthetic_vocabulary(std::uint64_t master_seed, int dim, int relation_groups,
                                              int function_groups, int entity_groups, int group_size) {
  SyntheticVocabulary out{SignatureVocab(master_seed, dim), {}, {}, {}};
  auto fill = [&](const std::string& prefix, int count, std::vector<std::vector<std::string>>& dest) {
    for (int g = 0; g < count; ++g) {
      std::vector<std::string> group;
      for (int m = 0; m < group_size; ++m)
        group.push_back(prefix + std::to_string(g) + static_cast<char>('a' + m));
      out.vocab.add_group(group);
      dest.push_back(std::move(group));
    }
  };
  fill("rel", relation_groups, out.relation_groups);
  fill("fn", function_groups, out.function_groups);
  fill("ent", entity_groups, out.entity_groups);
  return out;
}

Eigen::VectorXd node_features(const SmtNode& node, const SignatureVocab& vocab) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(feature_dim(vocab.dim()));
  f[static_cast<int>(node.kind)] = 1.0;
  f.tail(vocab.dim()) = vocab.embed(node.signature);
  return f;
}

Eigen::MatrixXd feature_matrix(const SmtDag& dag, const SignatureVocab& vocab) {
  Eigen::MatrixXd features(dag.size(), feature_dim(vocab.dim()));
  for (int v = 0; v < dag.size(); ++v) features.row(v) = node_features(dag.node(v), vocab).transpose();
  return features;
}

}  // namespace smt_analogy
