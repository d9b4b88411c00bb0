#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "smt_analogy/alignment.hpp"
#include "smt_analogy/io.hpp"
#include "smt_analogy/oracle.hpp"

namespace smt_analogy {

// Vocabulary seed shared by gen, train and infer unless overridden.
inline constexpr std::uint64_t kDefaultVocabSeed = 0;

/// Worker count: hardware concurrency, capped by SMT_ANALOGY_THREADS.
int worker_count();

/// Runs fn(0..n-1) on up to worker_count() threads. Each index writes only
/// its own output slot, so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// `num` target DAGs, each with params.pairs_per_dag planted pairs.
Corpus generate_corpus(const GenParams& params, int num, std::uint64_t seed,
                       std::uint64_t vocab_seed = kDefaultVocabSeed);

/// Trains on a 50% split of the corpus graphs.
Checkpoint train_model(const Corpus& corpus, const EmbedConfig& config, std::uint64_t vocab_seed = kDefaultVocabSeed,
                       int signature_dim = SignatureVocab::kDefaultDim, std::vector<double>* loss_trace = nullptr);

SignatureVocab checkpoint_vocabulary(const Checkpoint& checkpoint);

/// One prediction per corpus pair, in corpus order. Per-pair failures are
/// recorded in PairPrediction::error.
std::vector<PairPrediction> infer_corpus(const Checkpoint& checkpoint, const Corpus& corpus,
                                         const InferenceConfig& config);

/// Copy of the corpus with every gold list replaced by the oracle's best mapping.
Corpus oracle_corpus(const Corpus& corpus, const StructureMapLimits& limits = {});

/// Aggregate (micro) and per-pair metrics plus the per-pair exact-match rate.
/// Missing gold is computed by the oracle; gold is checked against the rules
/// before scoring.
json evaluate_predictions(const std::vector<PairPrediction>& predictions, const Corpus& gold,
                          const StructureMapLimits& limits = {});

/// infer + eval in one go; writes both files and returns the metrics.
json run_pipeline(const std::filesystem::path& corpus_path, const std::filesystem::path& model_path,
                  const InferenceConfig& config, const std::filesystem::path& predictions_out,
                  const std::filesystem::path& metrics_out);

/// Writes the score heatmap of one predicted pair.
void heatmap_for_pair(const std::vector<PairPrediction>& predictions, const std::string& pair_id,
                      const std::filesystem::path& out);

}  // namespace smt_analogy
