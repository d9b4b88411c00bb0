#include "smt_analogy/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "smt_analogy/random.hpp"

namespace smt_analogy {

void EmbedConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("EmbedConfig: " + what); };
  if (layers < 1) fail("layers must be at least 1");
  if (hidden < 1) fail("hidden width must be at least 1");
  if (dim < 1) fail("embedding dimension must be at least 1");
  if (!(margin > 0.0)) fail("margin must be positive");
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  if (steps < 0) fail("steps must be non-negative");
  if (batch_size < 1) fail("batch size must be positive");
  if (pool_positives < 1 || pool_negatives < 1) fail("training pool needs positives and negatives");
}

namespace {

std::string layer_name(int k, const char* part) { return "layer" + std::to_string(k) + "." + part; }

}  // namespace

EncoderParams::EncoderParams(int input_dim, int hidden, int dim, int layers)
    : input_dim_(input_dim), hidden_(hidden), dim_(dim), layers_(layers) {
  if (input_dim < 1 || hidden < 1 || dim < 1 || layers < 1)
    throw std::invalid_argument("EncoderParams: all dimensions must be positive");
  add_slot("input.weight", hidden, input_dim);
  add_slot("input.bias", hidden, 1);
  for (int k = 0; k < layers; ++k) {
    add_slot(layer_name(k, "eps"), 1, 1);
    add_slot(layer_name(k, "fc1.weight"), hidden, hidden);
    add_slot(layer_name(k, "fc1.bias"), hidden, 1);
    add_slot(layer_name(k, "fc2.weight"), hidden, hidden);
    add_slot(layer_name(k, "fc2.bias"), hidden, 1);
  }
  add_slot("head.weight", dim, hidden * layers);
  add_slot("head.bias", dim, 1);
  const auto& last = slots_.back();
  values_ = Eigen::VectorXd::Zero(last.offset + last.size());
}

void EncoderParams::add_slot(std::string name, int rows, int cols) {
  const int offset = slots_.empty() ? 0 : slots_.back().offset + slots_.back().size();
  index_[name] = slots_.size();
  slots_.push_back({std::move(name), offset, rows, cols});
}

EncoderParams EncoderParams::initialized(int input_dim, const EmbedConfig& config, std::uint64_t seed) {
  config.validate();
  EncoderParams params(input_dim, config.hidden, config.dim, config.layers);
  Rng rng(seed);
  for (const auto& slot : params.slots_) {
    // Glorot-uniform weights; biases and epsilons start at zero.
    if (slot.cols == 1) continue;
    const double bound = std::sqrt(6.0 / static_cast<double>(slot.rows + slot.cols));
    for (int i = 0; i < slot.size(); ++i) params.values_[slot.offset + i] = rng.uniform(-bound, bound);
  }
  return params;
}

const TensorSlot& EncoderParams::slot(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("EncoderParams: no tensor named '" + name + "'");
  return slots_[it->second];
}

Eigen::Map<Eigen::MatrixXd> EncoderParams::tensor(const std::string& name) {
  const auto& s = slot(name);
  return {values_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<const Eigen::MatrixXd> EncoderParams::tensor(const std::string& name) const {
  const auto& s = slot(name);
  return {values_.data() + s.offset, s.rows, s.cols};
}

GraphBatch GraphBatch::single(const SmtDag& dag, const SignatureVocab& vocab) {
  GraphBatch batch;
  batch.features.resize(0, feature_dim(vocab.dim()));
  batch.append(feature_matrix(dag, vocab), dag);
  return batch;
}

int GraphBatch::append(const Eigen::MatrixXd& graph_features, const SmtDag& dag) {
  if (graph_features.rows() != dag.size()) throw std::invalid_argument("GraphBatch: feature rows do not match DAG");
  const int offset = rows();
  if (features.cols() != graph_features.cols()) {
    if (offset != 0) throw std::invalid_argument("GraphBatch: inconsistent feature width");
    features.resize(0, graph_features.cols());
  }
  features.conservativeResize(offset + graph_features.rows(), Eigen::NoChange);
  features.bottomRows(graph_features.rows()) = graph_features;
  for (const auto& e : dag.edges()) edges.emplace_back(offset + e.src, offset + e.dst);
  offsets.push_back(offset);
  return offset;
}

namespace {

// Internally nodes are columns so each node's activations are contiguous.
template <typename Scalar>
MatrixX<Scalar> tensor_as(const EncoderParams& params, const std::string& name) {
  return params.tensor(name).template cast<Scalar>();
}

template <typename Scalar>
void add_child_sum(const std::vector<std::pair<int, int>>& edges, const MatrixX<Scalar>& x, MatrixX<Scalar>& out) {
  for (const auto& [parent, child] : edges) out.col(parent) += x.col(child);
}

}  // namespace

template <typename Scalar>
MatrixX<Scalar> encode_batch(const EncoderParams& params, const GraphBatch& batch, EncoderTape<Scalar>* tape) {
  if (batch.features.cols() != params.input_dim())
    throw std::invalid_argument("encode: feature width " + std::to_string(batch.features.cols()) +
                                " does not match encoder input " + std::to_string(params.input_dim()));
  const int n = batch.rows();
  const int h = params.hidden();
  const MatrixX<Scalar> features_t = batch.features.transpose().template cast<Scalar>();

  MatrixX<Scalar> x = tensor_as<Scalar>(params, "input.weight") * features_t;
  x.colwise() += tensor_as<Scalar>(params, "input.bias").col(0);

  MatrixX<Scalar> concat(h * params.layers(), n);
  if (tape) {
    tape->input = x;
    tape->summed.clear();
    tape->pre.clear();
    tape->layer.clear();
  }
  for (int k = 0; k < params.layers(); ++k) {
    const auto eps = static_cast<Scalar>(params.tensor(layer_name(k, "eps"))(0, 0));
    MatrixX<Scalar> z = (Scalar(1) + eps) * x;
    add_child_sum(batch.edges, x, z);
    MatrixX<Scalar> a = tensor_as<Scalar>(params, layer_name(k, "fc1.weight")) * z;
    a.colwise() += tensor_as<Scalar>(params, layer_name(k, "fc1.bias")).col(0);
    MatrixX<Scalar> next = tensor_as<Scalar>(params, layer_name(k, "fc2.weight")) * a.cwiseMax(Scalar(0));
    next.colwise() += tensor_as<Scalar>(params, layer_name(k, "fc2.bias")).col(0);
    concat.middleRows(k * h, h) = next;
    if (tape) {
      tape->summed.push_back(std::move(z));
      tape->pre.push_back(std::move(a));
      tape->layer.push_back(next);
    }
    x = std::move(next);
  }
  MatrixX<Scalar> out = tensor_as<Scalar>(params, "head.weight") * concat;
  out.colwise() += tensor_as<Scalar>(params, "head.bias").col(0);
  if (tape) tape->concat = std::move(concat);
  return out.transpose();
}

template MatrixX<double> encode_batch<double>(const EncoderParams&, const GraphBatch&, EncoderTape<double>*);
template MatrixX<long double> encode_batch<long double>(const EncoderParams&, const GraphBatch&,
                                                        EncoderTape<long double>*);

void encoder_backward(const EncoderParams& params, const GraphBatch& batch, const EncoderTape<double>& tape,
                      const Eigen::MatrixXd& grad_embeddings, Eigen::VectorXd& grad) {
  if (grad.size() != params.values().size()) grad = Eigen::VectorXd::Zero(params.values().size());
  auto grad_of = [&](const std::string& name) {
    const auto& s = params.slot(name);
    return Eigen::Map<Eigen::MatrixXd>(grad.data() + s.offset, s.rows, s.cols);
  };
  const int h = params.hidden();
  const Eigen::MatrixXd g = grad_embeddings.transpose();

  grad_of("head.weight").noalias() += g * tape.concat.transpose();
  grad_of("head.bias") += g.rowwise().sum();
  const Eigen::MatrixXd d_concat = params.tensor("head.weight").transpose() * g;

  Eigen::MatrixXd carry = Eigen::MatrixXd::Zero(h, batch.rows());
  for (int k = params.layers() - 1; k >= 0; --k) {
    const Eigen::MatrixXd d_out = d_concat.middleRows(k * h, h) + carry;
    const Eigen::MatrixXd& a = tape.pre[static_cast<std::size_t>(k)];
    const Eigen::MatrixXd& z = tape.summed[static_cast<std::size_t>(k)];
    const Eigen::MatrixXd& x_prev = k == 0 ? tape.input : tape.layer[static_cast<std::size_t>(k - 1)];

    grad_of(layer_name(k, "fc2.weight")).noalias() += d_out * a.cwiseMax(0.0).transpose();
    grad_of(layer_name(k, "fc2.bias")) += d_out.rowwise().sum();
    const Eigen::MatrixXd d_act = params.tensor(layer_name(k, "fc2.weight")).transpose() * d_out;
    const Eigen::MatrixXd d_pre = d_act.cwiseProduct((a.array() > 0.0).cast<double>().matrix());
    grad_of(layer_name(k, "fc1.weight")).noalias() += d_pre * z.transpose();
    grad_of(layer_name(k, "fc1.bias")) += d_pre.rowwise().sum();
    const Eigen::MatrixXd d_z = params.tensor(layer_name(k, "fc1.weight")).transpose() * d_pre;

    const double eps = params.tensor(layer_name(k, "eps"))(0, 0);
    grad_of(layer_name(k, "eps"))(0, 0) += d_z.cwiseProduct(x_prev).sum();
    carry = (1.0 + eps) * d_z;
    for (const auto& [parent, child] : batch.edges) carry.col(child) += d_z.col(parent);
  }
  const Eigen::MatrixXd features_t = batch.features.transpose();
  grad_of("input.weight").noalias() += carry * features_t.transpose();
  grad_of("input.bias") += carry.rowwise().sum();
}

Eigen::MatrixXd encode(const EncoderParams& params, const SmtDag& dag, const SignatureVocab& vocab) {
  require_valid(dag);
  return encode_batch<double>(params, GraphBatch::single(dag, vocab));
}

}  // namespace smt_analogy
