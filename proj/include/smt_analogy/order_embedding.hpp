#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "smt_analogy/encoder.hpp"
#include "smt_analogy/errors.hpp"
#include "smt_analogy/synth.hpp"

namespace smt_analogy {

/// ||max(0, h_u - h_v)||^2: zero exactly when h_u <= h_v in every coordinate.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar order_violation(const Eigen::MatrixBase<DerivedU>& h_u,
                                          const Eigen::MatrixBase<DerivedV>& h_v) {
  using Scalar = typename DerivedU::Scalar;
  if (h_u.size() != h_v.size()) throw std::invalid_argument("order_violation: dimension mismatch");
  return (h_u.derived() - h_v.derived().template cast<Scalar>()).cwiseMax(Scalar(0)).squaredNorm();
}

/// Hinge contribution of one pair given its violation D.
template <typename Scalar>
Scalar pair_loss(Scalar violation, bool positive, Scalar margin) {
  if (positive) return violation;
  return violation < margin ? margin - violation : Scalar(0);
}

/// Order pairs with their node features precomputed once.
class PreparedPairs {
 public:
  PreparedPairs(std::vector<OrderPair> pairs, const SignatureVocab& vocab);

  std::size_t size() const { return pairs_.size(); }
  const OrderPair& pair(std::size_t i) const { return pairs_[i]; }
  const std::vector<OrderPair>& pairs() const { return pairs_; }

  /// Stacks the selected pairs into one batch; fills query/anchor root rows.
  GraphBatch batch(std::span<const std::size_t> indices, std::vector<int>& query_rows,
                   std::vector<int>& anchor_rows) const;

 private:
  std::vector<OrderPair> pairs_;
  std::vector<Eigen::MatrixXd> query_features_;
  std::vector<Eigen::MatrixXd> anchor_features_;
};

/// Sum of D over positives plus max(0, margin - D) over negatives, with
/// D = order_violation(query root, anchor root).
template <typename Scalar>
Scalar margin_loss_value(const EncoderParams& params, const PreparedPairs& pairs,
                         std::span<const std::size_t> indices, double margin);

/// Loss value; writes the parameter gradient into `grad`.
double margin_loss_and_grad(const EncoderParams& params, const PreparedPairs& pairs,
                            std::span<const std::size_t> indices, double margin, Eigen::VectorXd& grad);

double margin_loss(const EncoderParams& params, std::span<const OrderPair> batch, double margin,
                   const SignatureVocab& vocab);

/// Per-pair violation D for every pair in the set.
std::vector<double> pair_violations(const EncoderParams& params, const PreparedPairs& pairs);

struct TrainResult {
  EncoderParams params;
  std::vector<double> loss_trace;
};

/// Adam on the margin loss over mini-batches drawn uniformly (with
/// replacement) from a fixed pool of pairs. Throws NumericError on a
/// non-finite loss.
TrainResult train_on_pairs(const EmbedConfig& config, const PreparedPairs& pairs, std::uint64_t seed);

/// Samples the pair pool from `corpus` (hops = config.layers), then trains.
TrainResult train_encoder(const EmbedConfig& config, const std::vector<SmtDag>& corpus, const SignatureVocab& vocab,
                          std::uint64_t seed);

}  // namespace smt_analogy
