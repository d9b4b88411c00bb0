#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "smt_analogy/encoder.hpp"
#include "smt_analogy/objective.hpp"
#include "smt_analogy/synth.hpp"

namespace smt_analogy {

enum class Parameterization {
  Raw,      // optimize X directly, squash with a sigmoid afterwards
  Sigmoid,  // optimize Z with X = sigmoid(Z) throughout
};

struct InferenceConfig {
  ObjectiveWeights weights;
  double learning_rate = 1e-3;
  int max_iterations = 2000;
  // Stop once |f_k - f_{k-1}| falls below this.
  double tolerance = 1e-10;
  double tau = 0.5;
  double init_scale = 0.1;
  Parameterization parameterization = Parameterization::Raw;
  // Independent seeded starts; the run with the lowest final objective wins.
  int restarts = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

using BinaryAlignment = Eigen::MatrixXi;

struct ContinuousAlignment {
  Eigen::MatrixXd raw;     // optimized variable (X, or Z in sigmoid mode)
  Eigen::MatrixXd scores;  // sigmoid(raw), entries in (0, 1)
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // initial value first
};

AlignmentProblem make_problem(const AnalogyInstance& instance, const EncoderParams& encoder,
                              const SignatureVocab& vocab);

/// Adam on the alignment objective from a seeded uniform start in
/// [-init_scale, init_scale]. Throws NumericError on a non-finite objective.
ContinuousAlignment optimize_alignment(const InferenceConfig& config, const AlignmentProblem& problem);

ContinuousAlignment optimize_alignment(const InferenceConfig& config, const AnalogyInstance& instance,
                                       const EncoderParams& encoder, const SignatureVocab& vocab);

/// Maximum-weight one-to-one assignment on the scores, then drops assigned
/// cells scoring below tau.
BinaryAlignment discretize(const Eigen::MatrixXd& scores, double tau);

bool is_one_to_one(const BinaryAlignment& x);

BinaryAlignment to_matrix(const std::vector<Correspondence>& pairs, int base_size, int target_size);
std::vector<Correspondence> to_pairs(const BinaryAlignment& x);

struct CandidateInference {
  NodeId base = 0;
  std::vector<NodeId> anchors;  // target partners of the children, by position

  bool operator==(const CandidateInference&) const = default;
};

/// Unmatched base expressions whose arguments are all matched.
std::vector<CandidateInference> candidate_inferences(const SmtDag& base, const SmtDag& target,
                                                     const BinaryAlignment& x);

}  // namespace smt_analogy
