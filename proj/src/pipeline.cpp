#include "smt_analogy/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "smt_analogy/heatmap.hpp"
#include "smt_analogy/order_embedding.hpp"
#include "smt_analogy/random.hpp"

namespace smt_analogy {

int worker_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("SMT_ANALOGY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && v >= 1) n = std::min<long>(n, v);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(worker_count()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  // An exception must not escape a worker thread; the one from the lowest
  // index is rethrown after joining, matching the serial path.
  std::mutex guard;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(guard);
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Corpus generate_corpus(const GenParams& params, int num, std::uint64_t seed, std::uint64_t vocab_seed) {
  if (num < 0) throw std::invalid_argument("generate_corpus: negative count");
  params.validate();
  const auto vocab = make_synthetic_vocabulary(vocab_seed);
  std::vector<std::vector<AnalogyInstance>> batches(static_cast<std::size_t>(num));
  parallel_for(batches.size(), [&](std::size_t i) {
    batches[i] = sample_analogy_pairs(params, vocab, derive_seed(seed, i));
  });
  std::vector<AnalogyInstance> all;
  for (std::size_t i = 0; i < batches.size(); ++i)
    for (std::size_t k = 0; k < batches[i].size(); ++k) {
      auto& inst = batches[i][k];
      const std::string suffix = std::to_string(i) + (k == 0 ? "" : "_" + std::to_string(k));
      inst.id = "p" + suffix;
      inst.base.set_id("b" + suffix);
      inst.target.set_id("t" + std::to_string(i));
      all.push_back(std::move(inst));
    }
  return Corpus::from_instances(all);
}

SignatureVocab checkpoint_vocabulary(const Checkpoint& checkpoint) {
  return make_synthetic_vocabulary(checkpoint.vocab_seed, checkpoint.signature_dim).vocab;
}

Checkpoint train_model(const Corpus& corpus, const EmbedConfig& config, std::uint64_t vocab_seed, int signature_dim,
                       std::vector<double>* loss_trace) {
  config.validate();
  if (corpus.graphs.size() < 2) throw DataError("train: corpus needs at least two graphs");
  Checkpoint out;
  out.config = config;
  out.vocab_seed = vocab_seed;
  out.signature_dim = signature_dim;
  const auto vocab = checkpoint_vocabulary(out);
  auto [train, held_out] = split_corpus(corpus.graphs, 0.5, derive_seed(config.seed, 20));
  (void)held_out;
  auto result = train_encoder(config, train, vocab, config.seed);
  out.params = std::move(result.params);
  if (loss_trace) *loss_trace = std::move(result.loss_trace);
  return out;
}

std::vector<PairPrediction> infer_corpus(const Checkpoint& checkpoint, const Corpus& corpus,
                                         const InferenceConfig& config) {
  config.validate();
  const auto vocab = checkpoint_vocabulary(checkpoint);
  const auto instances = corpus.instances();
  std::vector<PairPrediction> out(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) {
    const auto& inst = instances[i];
    auto& pred = out[i];
    pred.id = inst.id;
    try {
      InferenceConfig local = config;
      local.seed = derive_seed(config.seed, stable_hash(inst.id));
      auto result = optimize_alignment(local, inst, checkpoint.params, vocab);
      pred.binary = discretize(result.scores, config.tau);
      pred.candidates = candidate_inferences(inst.base, inst.target, pred.binary);
      pred.scores = std::move(result.scores);
      pred.objective_trace = std::move(result.objective_trace);
    } catch (const std::exception& e) {
      pred.scores.resize(0, 0);
      pred.binary.resize(0, 0);
      pred.objective_trace.clear();
      pred.candidates.clear();
      pred.error = e.what();
    }
  });
  return out;
}

Corpus oracle_corpus(const Corpus& corpus, const StructureMapLimits& limits) {
  Corpus out = corpus;
  const auto instances = corpus.instances();
  std::vector<std::string> failures(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) {
    try {
      out.pairs[i].gold = best_structure_map(instances[i].base, instances[i].target, limits);
    } catch (const SizeLimitError& e) {
      failures[i] = "pair '" + instances[i].id + "': " + e.what();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) throw SizeLimitError(f);
  return out;
}

json evaluate_predictions(const std::vector<PairPrediction>& predictions, const Corpus& gold,
                          const StructureMapLimits& limits) {
  std::map<std::string, std::size_t> index;
  const auto instances = gold.instances();
  for (std::size_t i = 0; i < instances.size(); ++i) index[instances[i].id] = i;

  std::vector<json> rows(predictions.size());
  std::vector<BinaryAlignment> gold_matrices(predictions.size());
  std::vector<char> scored(predictions.size(), 0);
  parallel_for(predictions.size(), [&](std::size_t i) {
    const auto& pred = predictions[i];
    json row = {{"id", pred.id}};
    try {
      if (pred.error) throw DataError("prediction failed: " + *pred.error);
      const auto it = index.find(pred.id);
      if (it == index.end()) throw DataError("no gold pair with this id");
      const auto& inst = instances[it->second];
      const Mapping mapping = inst.gold ? *inst.gold : best_structure_map(inst.base, inst.target, limits);
      const auto g = to_matrix(mapping, inst.base.size(), inst.target.size());
      const auto report = verify_alignment(inst.base, inst.target, g);
      if (!report.all_rules()) throw DataError("gold alignment violates the mapping rules");
      if (pred.scores.rows() != g.rows() || pred.scores.cols() != g.cols())
        throw DataError("prediction shape does not match the pair");
      const auto m = compute_metrics(pred.scores, pred.binary, g);
      row["metrics"] = metrics_to_json(m);
      row["exact_match"] = pred.binary == g;
      gold_matrices[i] = g;
      scored[i] = 1;
    } catch (const std::exception& e) {
      row["error"] = e.what();
    }
    rows[i] = std::move(row);
  });

  // Pooled in prediction order so the aggregate is schedule independent.
  MetricsAccumulator acc;
  int n_scored = 0;
  int exact = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!scored[i]) continue;
    acc.add(predictions[i].scores, predictions[i].binary, gold_matrices[i]);
    ++n_scored;
    if (rows[i]["exact_match"].get<bool>()) ++exact;
  }
  json pairs = json::array();
  for (auto& r : rows) pairs.push_back(std::move(r));
  return {{"version", kFormatVersion},
          {"aggregate", metrics_to_json(acc.result())},
          {"exact_match_rate", n_scored > 0 ? static_cast<double>(exact) / n_scored : 0.0},
          {"scored", n_scored},
          {"failed", static_cast<int>(predictions.size()) - n_scored},
          {"pairs", std::move(pairs)}};
}

json run_pipeline(const std::filesystem::path& corpus_path, const std::filesystem::path& model_path,
                  const InferenceConfig& config, const std::filesystem::path& predictions_out,
                  const std::filesystem::path& metrics_out) {
  const auto corpus = corpus_from_json(read_json_file(corpus_path), corpus_path.string());
  const auto checkpoint = checkpoint_from_json(read_json_file(model_path), model_path.string());
  const auto predictions = infer_corpus(checkpoint, corpus, config);
  write_json_file(predictions_out, predictions_to_json(predictions));
  auto metrics = evaluate_predictions(predictions, corpus);
  write_json_file(metrics_out, metrics);
  return metrics;
}

void heatmap_for_pair(const std::vector<PairPrediction>& predictions, const std::string& pair_id,
                      const std::filesystem::path& out) {
  for (const auto& p : predictions) {
    if (p.id != pair_id) continue;
    if (p.error) throw DataError("pair '" + pair_id + "' has no scores: " + *p.error);
    export_heatmap(p.scores, out);
    return;
  }
  throw DataError("no prediction for pair '" + pair_id + "'");
}

}  // namespace smt_analogy
