#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "smt_analogy/encoder.hpp"

namespace smt_analogy {

enum class DepthTerm {
  // lambda1 * ||J d_T - X d_T||_2, J the all-ones |V_B| x |V_T| matrix.
  Penalized,
  // -lambda1 * ||X d_T||_2^2, the unrelaxed systematicity reward.
  Reward,
};

struct ObjectiveWeights {
  double lambda1 = 1e-3;
  double lambda2 = 1e-1;
  double lambda3 = 1e-3;
  DepthTerm depth_term = DepthTerm::Penalized;
};

/// Fixed data of one alignment problem: adjacency, node embeddings and
/// target heights.
struct AlignmentProblem {
  Eigen::MatrixXd target_adjacency;  // |V_T| x |V_T|
  Eigen::MatrixXd base_adjacency;    // |V_B| x |V_B|
  Eigen::MatrixXd target_embeddings; // |V_T| x d
  Eigen::MatrixXd base_embeddings;   // |V_B| x d
  Eigen::VectorXd target_heights;    // |V_T|

  int base_size() const { return static_cast<int>(base_adjacency.rows()); }
  int target_size() const { return static_cast<int>(target_adjacency.rows()); }

  /// Throws std::invalid_argument on inconsistent shapes.
  void check() const;
  void check(Eigen::Index rows, Eigen::Index cols) const;
};

template <typename Scalar>
struct ObjectiveTerms {
  Scalar structural{0};     // ||X A_T X^T - A_B||_F^2
  Scalar depth{0};          // weighted depth term
  Scalar embedding{0};      // lambda2 ||max(0, H_B - X H_T)||_F^2
  Scalar orthogonality{0};  // lambda3 ||I - X X^T||_F
  Scalar total() const { return structural + depth + embedding + orthogonality; }
};

/// Every term of the penalized alignment objective at X.
template <typename Scalar>
ObjectiveTerms<Scalar> objective_terms(const MatrixX<Scalar>& x, const AlignmentProblem& problem,
                                       const ObjectiveWeights& weights) {
  problem.check(x.rows(), x.cols());
  const MatrixX<Scalar> a_t = problem.target_adjacency.cast<Scalar>();
  const MatrixX<Scalar> a_b = problem.base_adjacency.cast<Scalar>();
  const VectorX<Scalar> d_t = problem.target_heights.cast<Scalar>();

  ObjectiveTerms<Scalar> terms;
  terms.structural = (x * a_t * x.transpose() - a_b).squaredNorm();

  const VectorX<Scalar> selected = x * d_t;
  if (weights.depth_term == DepthTerm::Penalized) {
    const VectorX<Scalar> full = VectorX<Scalar>::Constant(x.rows(), d_t.sum());
    terms.depth = Scalar(weights.lambda1) * (full - selected).norm();
  } else {
    terms.depth = -Scalar(weights.lambda1) * selected.squaredNorm();
  }

  const MatrixX<Scalar> shortfall =
      (problem.base_embeddings.cast<Scalar>() - x * problem.target_embeddings.cast<Scalar>()).cwiseMax(Scalar(0));
  terms.embedding = Scalar(weights.lambda2) * shortfall.squaredNorm();

  const MatrixX<Scalar> gram = MatrixX<Scalar>::Identity(x.rows(), x.rows()) - x * x.transpose();
  terms.orthogonality = Scalar(weights.lambda3) * gram.norm();
  return terms;
}

template <typename Scalar>
Scalar objective(const MatrixX<Scalar>& x, const AlignmentProblem& problem, const ObjectiveWeights& weights) {
  return objective_terms(x, problem, weights).total();
}

/// Analytic gradient of `objective` with respect to X. Norm terms use the
/// zero subgradient where their argument vanishes.
Eigen::MatrixXd objective_grad(const Eigen::MatrixXd& x, const AlignmentProblem& problem,
                               const ObjectiveWeights& weights);

}  // namespace smt_analogy
