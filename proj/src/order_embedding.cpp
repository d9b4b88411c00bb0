#include "smt_analogy/order_embedding.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "smt_analogy/adam.hpp"
#include "smt_analogy/random.hpp"

namespace smt_analogy {

PreparedPairs::PreparedPairs(std::vector<OrderPair> pairs, const SignatureVocab& vocab) : pairs_(std::move(pairs)) {
  query_features_.reserve(pairs_.size());
  anchor_features_.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    query_features_.push_back(feature_matrix(p.query, vocab));
    anchor_features_.push_back(feature_matrix(p.anchor, vocab));
  }
}

GraphBatch PreparedPairs::batch(std::span<const std::size_t> indices, std::vector<int>& query_rows,
                                std::vector<int>& anchor_rows) const {
  GraphBatch batch;
  query_rows.clear();
  anchor_rows.clear();
  for (std::size_t i : indices) {
    const auto& p = pairs_.at(i);
    query_rows.push_back(batch.append(query_features_[i], p.query) + p.query_root);
    anchor_rows.push_back(batch.append(anchor_features_[i], p.anchor) + p.anchor_root);
  }
  return batch;
}

template <typename Scalar>
Scalar margin_loss_value(const EncoderParams& params, const PreparedPairs& pairs,
                         std::span<const std::size_t> indices, double margin) {
  std::vector<int> q, a;
  const GraphBatch batch = pairs.batch(indices, q, a);
  const MatrixX<Scalar> h = encode_batch<Scalar>(params, batch);
  Scalar total(0);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Scalar d = order_violation(h.row(q[k]), h.row(a[k]));
    total += pair_loss(d, pairs.pair(indices[k]).positive, static_cast<Scalar>(margin));
  }
  return total;
}

template double margin_loss_value<double>(const EncoderParams&, const PreparedPairs&, std::span<const std::size_t>,
                                          double);
template long double margin_loss_value<long double>(const EncoderParams&, const PreparedPairs&,
                                                    std::span<const std::size_t>, double);

double margin_loss_and_grad(const EncoderParams& params, const PreparedPairs& pairs,
                            std::span<const std::size_t> indices, double margin, Eigen::VectorXd& grad) {
  grad = Eigen::VectorXd::Zero(params.values().size());
  std::vector<int> q, a;
  const GraphBatch batch = pairs.batch(indices, q, a);
  EncoderTape<double> tape;
  const Eigen::MatrixXd h = encode_batch<double>(params, batch, &tape);
  Eigen::MatrixXd grad_h = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  double total = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Eigen::RowVectorXd excess = (h.row(q[k]) - h.row(a[k])).cwiseMax(0.0);
    const double d = excess.squaredNorm();
    const bool positive = pairs.pair(indices[k]).positive;
    total += pair_loss(d, positive, margin);
    double sign = 0.0;
    if (positive) {
      sign = 1.0;
    } else if (d < margin) {
      sign = -1.0;
    }
    if (sign != 0.0) {
      grad_h.row(q[k]) += sign * 2.0 * excess;
      grad_h.row(a[k]) -= sign * 2.0 * excess;
    }
  }
  encoder_backward(params, batch, tape, grad_h, grad);
  return total;
}

double margin_loss(const EncoderParams& params, std::span<const OrderPair> batch, double margin,
                   const SignatureVocab& vocab) {
  if (batch.empty()) throw std::invalid_argument("margin_loss: empty batch");
  PreparedPairs prepared(std::vector<OrderPair>(batch.begin(), batch.end()), vocab);
  std::vector<std::size_t> all(prepared.size());
  std::iota(all.begin(), all.end(), 0);
  return margin_loss_value<double>(params, prepared, all, margin);
}

std::vector<double> pair_violations(const EncoderParams& params, const PreparedPairs& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < pairs.size(); start += kChunk) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(pairs.size(), start + kChunk); ++i) idx.push_back(i);
    std::vector<int> q, a;
    const GraphBatch batch = pairs.batch(idx, q, a);
    const Eigen::MatrixXd h = encode_batch<double>(params, batch);
    for (std::size_t k = 0; k < idx.size(); ++k) out.push_back(order_violation(h.row(q[k]), h.row(a[k])));
  }
  return out;
}

TrainResult train_on_pairs(const EmbedConfig& config, const PreparedPairs& pairs, std::uint64_t seed) {
  config.validate();
  if (pairs.size() == 0) throw std::invalid_argument("train_encoder: no training pairs");
  std::vector<std::size_t> first{0};
  std::vector<int> q, a;
  const int width = static_cast<int>(pairs.batch(first, q, a).features.cols());

  TrainResult result{EncoderParams::initialized(width, config, derive_seed(seed, 11)), {}};
  AdamState<Eigen::VectorXd> adam(result.params.values());
  Rng rng(derive_seed(seed, 12));
  std::vector<std::size_t> batch(static_cast<std::size_t>(config.batch_size));
  Eigen::VectorXd grad;
  result.loss_trace.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 0; step < config.steps; ++step) {
    for (auto& i : batch) i = rng.index(pairs.size());
    const double loss = margin_loss_and_grad(result.params, pairs, batch, config.margin, grad);
    if (!std::isfinite(loss) || !grad.allFinite()) {
      std::ostringstream msg;
      msg << "train_encoder: non-finite loss at step " << step << " (loss " << loss << ")";
      throw NumericError(msg.str());
    }
    result.loss_trace.push_back(loss);
    adam_step(result.params.values(), grad, adam, config.learning_rate);
  }
  return result;
}

TrainResult train_encoder(const EmbedConfig& config, const std::vector<SmtDag>& corpus, const SignatureVocab& vocab,
                          std::uint64_t seed) {
  config.validate();
  OrderPairOptions options;
  options.n_pos = config.pool_positives;
  options.n_neg = config.pool_negatives;
  options.hops = config.layers;
  options.seed = derive_seed(seed, 10);
  PreparedPairs pairs(sample_order_pairs(corpus, options), vocab);
  return train_on_pairs(config, pairs, seed);
}

}  // namespace smt_analogy
