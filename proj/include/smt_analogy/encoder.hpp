#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smt_analogy/dag.hpp"
#include "smt_analogy/vocab.hpp"

namespace smt_analogy {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

struct EmbedConfig {
  int layers = 3;
  int hidden = 64;
  int dim = 64;
  double margin = 1.0;
  double learning_rate = 1e-3;
  int steps = 2000;
  int batch_size = 32;
  // Size of the fixed training pool of order pairs, per label.
  int pool_positives = 512;
  int pool_negatives = 512;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Shape of one named tensor inside the flat parameter vector.
struct TensorSlot {
  std::string name;
  int offset = 0;
  int rows = 0;
  int cols = 0;
  int size() const { return rows * cols; }
};

/// Weights of the sum-pooling encoder, stored as one flat vector so that the
/// optimizer and the gradient checker see a single parameter point.
///
/// Layout: input projection, then per layer an epsilon scalar and a
/// two-layer perceptron, then a linear head over the concatenated layer
/// outputs.
class EncoderParams {
 public:
  EncoderParams() = default;
  EncoderParams(int input_dim, int hidden, int dim, int layers);

  static EncoderParams initialized(int input_dim, const EmbedConfig& config, std::uint64_t seed);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  int dim() const { return dim_; }
  int layers() const { return layers_; }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  const std::vector<TensorSlot>& slots() const { return slots_; }
  const TensorSlot& slot(const std::string& name) const;

  Eigen::Map<Eigen::MatrixXd> tensor(const std::string& name);
  Eigen::Map<const Eigen::MatrixXd> tensor(const std::string& name) const;

  bool all_finite() const { return values_.allFinite(); }
  bool operator==(const EncoderParams& other) const {
    return input_dim_ == other.input_dim_ && hidden_ == other.hidden_ && dim_ == other.dim_ &&
           layers_ == other.layers_ && values_ == other.values_;
  }

 private:
  void add_slot(std::string name, int rows, int cols);

  int input_dim_ = 0;
  int hidden_ = 0;
  int dim_ = 0;
  int layers_ = 0;
  std::vector<TensorSlot> slots_;
  std::map<std::string, std::size_t> index_;
  Eigen::VectorXd values_;
};

/// Disjoint union of graphs prepared for one encoder pass: stacked node
/// features plus the (parent, child) edge list in stacked row indices.
struct GraphBatch {
  Eigen::MatrixXd features;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> offsets;  // first row of each graph

  static GraphBatch single(const SmtDag& dag, const SignatureVocab& vocab);
  /// Appends a graph with precomputed features; returns its row offset.
  int append(const Eigen::MatrixXd& graph_features, const SmtDag& dag);
  int rows() const { return static_cast<int>(features.rows()); }
};

/// Intermediate activations kept for the backward pass.
template <typename Scalar>
struct EncoderTape {
  MatrixX<Scalar> input;                // X0
  std::vector<MatrixX<Scalar>> summed;  // Z_k = (1 + eps_k) X_{k-1} + sum over children
  std::vector<MatrixX<Scalar>> pre;     // first perceptron pre-activation
  std::vector<MatrixX<Scalar>> layer;   // X_k
  MatrixX<Scalar> concat;
};

/// Node embeddings (one row per stacked node). Messages flow child to
/// parent, so a root summarizes its descendants within `layers` hops.
template <typename Scalar>
MatrixX<Scalar> encode_batch(const EncoderParams& params, const GraphBatch& batch,
                             EncoderTape<Scalar>* tape = nullptr);

/// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(embeddings).
void encoder_backward(const EncoderParams& params, const GraphBatch& batch, const EncoderTape<double>& tape,
                      const Eigen::MatrixXd& grad_embeddings, Eigen::VectorXd& grad);

/// Embeddings of every node of one DAG. Throws std::invalid_argument if the
/// feature width does not match the parameters or the DAG is invalid.
Eigen::MatrixXd encode(const EncoderParams& params, const SmtDag& dag, const SignatureVocab& vocab);

}  // namespace smt_analogy
