#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smt_analogy/alignment.hpp"
#include "smt_analogy/encoder.hpp"
#include "smt_analogy/errors.hpp"
#include "smt_analogy/metrics.hpp"
#include "smt_analogy/synth.hpp"

namespace smt_analogy {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

json graph_to_json(const SmtDag& dag);
/// Throws DataError naming `context` on schema problems.
SmtDag graph_from_json(const json& j, const std::string& context = "graph");

/// Graphs plus base/target pair references, as stored on disk.
struct Corpus {
  std::vector<SmtDag> graphs;
  struct PairRef {
    std::string id;
    std::string base;
    std::string target;
    std::optional<std::vector<Correspondence>> gold;
  };
  std::vector<PairRef> pairs;

  static Corpus from_instances(const std::vector<AnalogyInstance>& instances);
  /// Resolves graph references. Throws DataError on unknown ids.
  std::vector<AnalogyInstance> instances() const;
  const SmtDag& graph(const std::string& id) const;
};

json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const json& j, const std::string& context = "corpus");

struct Checkpoint {
  EmbedConfig config;
  std::uint64_t vocab_seed = 0;
  int signature_dim = SignatureVocab::kDefaultDim;
  EncoderParams params;
};

json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const json& j, const std::string& context = "checkpoint");

struct PairPrediction {
  std::string id;
  Eigen::MatrixXd scores;
  BinaryAlignment binary;
  std::vector<double> objective_trace;
  std::vector<CandidateInference> candidates;
  std::optional<std::string> error;
};

json predictions_to_json(const std::vector<PairPrediction>& predictions);
std::vector<PairPrediction> predictions_from_json(const json& j, const std::string& context = "predictions");

json metrics_to_json(const Metrics& m);

/// Reads and parses a JSON file. Parse errors carry the file name and line.
json read_json_file(const std::filesystem::path& path);

/// Writes `j.dump(2)` plus a trailing newline. Throws DataError on IO failure.
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace smt_analogy
