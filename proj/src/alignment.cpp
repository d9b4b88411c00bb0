#include "smt_analogy/alignment.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "smt_analogy/adam.hpp"
#include "smt_analogy/assignment.hpp"
#include "smt_analogy/order_embedding.hpp"
#include "smt_analogy/random.hpp"

namespace smt_analogy {

void AlignmentProblem::check() const {
  const auto nt = target_adjacency.rows();
  const auto nb = base_adjacency.rows();
  if (target_adjacency.cols() != nt || base_adjacency.cols() != nb)
    throw std::invalid_argument("alignment problem: adjacency matrices must be square");
  if (target_embeddings.rows() != nt || base_embeddings.rows() != nb ||
      target_embeddings.cols() != base_embeddings.cols())
    throw std::invalid_argument("alignment problem: embedding shapes do not match the graphs");
  if (target_heights.size() != nt) throw std::invalid_argument("alignment problem: height vector size mismatch");
}

void AlignmentProblem::check(Eigen::Index rows, Eigen::Index cols) const {
  check();
  if (rows != base_adjacency.rows() || cols != target_adjacency.rows())
    throw std::invalid_argument("alignment problem: X must be |V_B| x |V_T|");
}

Eigen::MatrixXd objective_grad(const Eigen::MatrixXd& x, const AlignmentProblem& problem,
                               const ObjectiveWeights& weights) {
  problem.check(x.rows(), x.cols());
  const auto& a_t = problem.target_adjacency;
  const auto& d_t = problem.target_heights;

  const Eigen::MatrixXd residual = x * a_t * x.transpose() - problem.base_adjacency;
  Eigen::MatrixXd grad = 2.0 * (residual * x * a_t.transpose() + residual.transpose() * x * a_t);

  const Eigen::VectorXd selected = x * d_t;
  if (weights.depth_term == DepthTerm::Penalized) {
    const Eigen::VectorXd gap = Eigen::VectorXd::Constant(x.rows(), d_t.sum()) - selected;
    const double norm = gap.norm();
    if (norm > 0.0) grad -= (weights.lambda1 / norm) * gap * d_t.transpose();
  } else {
    grad -= 2.0 * weights.lambda1 * selected * d_t.transpose();
  }

  const Eigen::MatrixXd shortfall =
      (problem.base_embeddings - x * problem.target_embeddings).cwiseMax(0.0);
  grad -= 2.0 * weights.lambda2 * shortfall * problem.target_embeddings.transpose();

  const Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(x.rows(), x.rows()) - x * x.transpose();
  const double gram_norm = gram.norm();
  if (gram_norm > 0.0) grad -= (2.0 * weights.lambda3 / gram_norm) * gram * x;
  return grad;
}

void InferenceConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("InferenceConfig: " + what); };
  if (weights.lambda1 < 0.0 || weights.lambda2 < 0.0 || weights.lambda3 < 0.0) fail("lambdas must be non-negative");
  if (!(tau > 0.0 && tau < 1.0)) fail("tau must lie in (0, 1)");
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  if (max_iterations < 0) fail("max iterations must be non-negative");
  if (!(tolerance >= 0.0)) fail("tolerance must be non-negative");
  if (!(init_scale >= 0.0)) fail("init scale must be non-negative");
  if (restarts < 1) fail("restarts must be at least 1");
}

AlignmentProblem make_problem(const AnalogyInstance& instance, const EncoderParams& encoder,
                              const SignatureVocab& vocab) {
  AlignmentProblem problem;
  problem.target_adjacency = adjacency_matrix(instance.target);
  problem.base_adjacency = adjacency_matrix(instance.base);
  problem.target_embeddings = encode(encoder, instance.target, vocab);
  problem.base_embeddings = encode(encoder, instance.base, vocab);
  const auto heights = node_heights(instance.target);
  problem.target_heights.resize(static_cast<Eigen::Index>(heights.size()));
  for (std::size_t i = 0; i < heights.size(); ++i) problem.target_heights[static_cast<Eigen::Index>(i)] = heights[i];
  return problem;
}

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

}  // namespace

namespace {

ContinuousAlignment optimize_once(const InferenceConfig& config, const AlignmentProblem& problem, std::uint64_t seed) {
  const int rows = problem.base_size();
  const int cols = problem.target_size();

  Rng rng(seed);
  Eigen::MatrixXd raw(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) raw(i, j) = rng.uniform(-config.init_scale, config.init_scale);

  const bool squashed = config.parameterization == Parameterization::Sigmoid;
  auto point = [&](const Eigen::MatrixXd& r) { return squashed ? sigmoid(r) : r; };
  auto evaluate = [&](const Eigen::MatrixXd& r, int iteration) {
    const double value = objective<double>(point(r), problem, config.weights);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "optimize_alignment: non-finite objective at iteration " << iteration;
      throw NumericError(msg.str());
    }
    return value;
  };

  ContinuousAlignment result;
  double current = evaluate(raw, 0);
  result.objective_trace.push_back(current);
  AdamState<Eigen::MatrixXd> adam(raw);
  int iteration = 0;
  while (iteration < config.max_iterations) {
    Eigen::MatrixXd grad;
    if (squashed) {
      const Eigen::MatrixXd x = sigmoid(raw);
      grad = objective_grad(x, problem, config.weights).cwiseProduct(x.cwiseProduct((1.0 - x.array()).matrix()));
    } else {
      grad = objective_grad(raw, problem, config.weights);
    }
    adam_step(raw, grad, adam, config.learning_rate);
    ++iteration;
    const double next = evaluate(raw, iteration);
    result.objective_trace.push_back(next);
    const double change = std::abs(next - current);
    current = next;
    if (change < config.tolerance) break;
  }
  result.raw = raw;
  result.scores = sigmoid(raw);
  result.objective = current;
  result.iterations = iteration;
  return result;
}

}  // namespace

ContinuousAlignment optimize_alignment(const InferenceConfig& config, const AlignmentProblem& problem) {
  config.validate();
  problem.check();
  ContinuousAlignment best = optimize_once(config, problem, config.seed);
  for (int r = 1; r < config.restarts; ++r) {
    auto next = optimize_once(config, problem, derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    if (next.objective < best.objective) best = std::move(next);
  }
  return best;
}

ContinuousAlignment optimize_alignment(const InferenceConfig& config, const AnalogyInstance& instance,
                                       const EncoderParams& encoder, const SignatureVocab& vocab) {
  require_valid(instance.base);
  require_valid(instance.target);
  return optimize_alignment(config, make_problem(instance, encoder, vocab));
}

BinaryAlignment discretize(const Eigen::MatrixXd& scores, double tau) {
  BinaryAlignment out = BinaryAlignment::Zero(scores.rows(), scores.cols());
  const auto assignment = max_weight_assignment(scores);
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    const int c = assignment[r];
    if (c >= 0 && scores(static_cast<Eigen::Index>(r), c) >= tau) out(static_cast<Eigen::Index>(r), c) = 1;
  }
  return out;
}

bool is_one_to_one(const BinaryAlignment& x) {
  if ((x.array() != 0 && x.array() != 1).any()) return false;
  return (x.rowwise().sum().array() <= 1).all() && (x.colwise().sum().array() <= 1).all();
}

BinaryAlignment to_matrix(const std::vector<Correspondence>& pairs, int base_size, int target_size) {
  BinaryAlignment x = BinaryAlignment::Zero(base_size, target_size);
  for (const auto& [b, t] : pairs) {
    if (b < 0 || b >= base_size || t < 0 || t >= target_size)
      throw std::invalid_argument("to_matrix: correspondence out of range");
    x(b, t) = 1;
  }
  return x;
}

std::vector<Correspondence> to_pairs(const BinaryAlignment& x) {
  std::vector<Correspondence> pairs;
  for (Eigen::Index b = 0; b < x.rows(); ++b)
    for (Eigen::Index t = 0; t < x.cols(); ++t)
      if (x(b, t) != 0) pairs.emplace_back(static_cast<NodeId>(b), static_cast<NodeId>(t));
  return pairs;
}

std::vector<CandidateInference> candidate_inferences(const SmtDag& base, const SmtDag& target,
                                                     const BinaryAlignment& x) {
  if (x.rows() != base.size() || x.cols() != target.size())
    throw std::invalid_argument("candidate_inferences: alignment shape mismatch");
  std::vector<NodeId> partner(static_cast<std::size_t>(base.size()), -1);
  for (const auto& [b, t] : to_pairs(x)) partner[static_cast<std::size_t>(b)] = t;

  std::vector<CandidateInference> out;
  for (NodeId u = 0; u < base.size(); ++u) {
    if (partner[static_cast<std::size_t>(u)] >= 0 || base.children(u).empty()) continue;
    CandidateInference candidate{u, {}};
    bool supported = true;
    for (const auto& c : base.children(u)) {
      const NodeId t = partner[static_cast<std::size_t>(c.node)];
      if (t < 0) {
        supported = false;
        break;
      }
      candidate.anchors.push_back(t);
    }
    if (supported) out.push_back(std::move(candidate));
  }
  return out;
}

}  // namespace smt_analogy
