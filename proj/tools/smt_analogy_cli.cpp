#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "smt_analogy/pipeline.hpp"

using namespace smt_analogy;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "error (" << kind << "): " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-mapping analogies between SMT DAGs"};
  app.require_subcommand(1);

  // gen
  std::string gen_out;
  int gen_num = 100;
  GenParams gen;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus of planted analogy pairs");
  gen_cmd->add_option("--out", gen_out, "Corpus JSON to write")->required();
  gen_cmd->add_option("--num", gen_num, "Number of target DAGs")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--depth-min", gen.depth_min)->capture_default_str();
  gen_cmd->add_option("--depth-max", gen.depth_max)->capture_default_str();
  gen_cmd->add_option("--distractor", gen.distractor)->capture_default_str();
  gen_cmd->add_option("--relabel", gen.relabel)->capture_default_str();
  gen_cmd->add_option("--pairs-per-dag", gen.pairs_per_dag)->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed)->capture_default_str();

  // train
  std::string train_corpus, train_out;
  EmbedConfig embed;
  embed.steps = 5000;
  auto* train_cmd = app.add_subcommand("train", "Train the order-embedding encoder");
  train_cmd->add_option("--corpus", train_corpus)->required();
  train_cmd->add_option("--out", train_out, "Model checkpoint to write")->required();
  train_cmd->add_option("--k", embed.layers, "Encoder layers")->capture_default_str();
  train_cmd->add_option("--dim", embed.dim)->capture_default_str();
  train_cmd->add_option("--margin", embed.margin)->capture_default_str();
  train_cmd->add_option("--steps", embed.steps)->capture_default_str();
  train_cmd->add_option("--lr", embed.learning_rate)->capture_default_str();
  train_cmd->add_option("--seed", embed.seed)->capture_default_str();

  // infer
  std::string infer_model, infer_corpus_path, infer_out;
  InferenceConfig inference;
  auto* infer_cmd = app.add_subcommand("infer", "Optimize alignments for every corpus pair");
  infer_cmd->add_option("--model", infer_model)->required();
  infer_cmd->add_option("--corpus", infer_corpus_path)->required();
  infer_cmd->add_option("--out", infer_out, "Predictions JSON to write")->required();
  infer_cmd->add_option("--lambda1", inference.weights.lambda1)->capture_default_str();
  infer_cmd->add_option("--lambda2", inference.weights.lambda2)->capture_default_str();
  infer_cmd->add_option("--lambda3", inference.weights.lambda3)->capture_default_str();
  infer_cmd->add_option("--lr", inference.learning_rate)->capture_default_str();
  infer_cmd->add_option("--iters", inference.max_iterations)->capture_default_str();
  infer_cmd->add_option("--tau", inference.tau)->capture_default_str();
  infer_cmd->add_option("--seed", inference.seed)->capture_default_str();
  infer_cmd->add_option("--restarts", inference.restarts, "Seeded starts; lowest objective wins")->capture_default_str();
  infer_cmd->add_option("--init-scale", inference.init_scale)->capture_default_str();
  infer_cmd->add_option("--parameterization", inference.parameterization, "raw or sigmoid")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Parameterization>{{"raw", Parameterization::Raw}, {"sigmoid", Parameterization::Sigmoid}}));

  // oracle
  std::string oracle_corpus_path, oracle_out;
  StructureMapLimits limits;
  auto* oracle_cmd = app.add_subcommand("oracle", "Fill gold alignments with the exact structure map");
  oracle_cmd->add_option("--corpus", oracle_corpus_path)->required();
  oracle_cmd->add_option("--out", oracle_out, "Gold corpus JSON to write")->required();
  oracle_cmd->add_option("--max-base", limits.max_base)->capture_default_str();
  oracle_cmd->add_option("--max-target", limits.max_target)->capture_default_str();

  // eval
  std::string eval_pred, eval_gold, eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold");
  eval_cmd->add_option("--pred", eval_pred)->required();
  eval_cmd->add_option("--gold", eval_gold)->required();
  eval_cmd->add_option("--out", eval_out, "Metrics JSON to write")->required();

  // heatmap
  std::string heat_pred, heat_pair, heat_out;
  auto* heat_cmd = app.add_subcommand("heatmap", "Export one score matrix as a PGM image");
  heat_cmd->add_option("--pred", heat_pred)->required();
  heat_cmd->add_option("--pair", heat_pair)->required();
  heat_cmd->add_option("--out", heat_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen_cmd->parsed()) {
      write_json_file(gen_out, corpus_to_json(generate_corpus(gen, gen_num, gen_seed)));
    } else if (train_cmd->parsed()) {
      const auto corpus = corpus_from_json(read_json_file(train_corpus), train_corpus);
      std::vector<double> trace;
      const auto checkpoint = train_model(corpus, embed, kDefaultVocabSeed, SignatureVocab::kDefaultDim, &trace);
      write_json_file(train_out, checkpoint_to_json(checkpoint));
      if (!trace.empty())
        std::cerr << "loss " << trace.front() << " -> " << trace.back() << " over " << trace.size() << " steps\n";
    } else if (infer_cmd->parsed()) {
      const auto checkpoint = checkpoint_from_json(read_json_file(infer_model), infer_model);
      const auto corpus = corpus_from_json(read_json_file(infer_corpus_path), infer_corpus_path);
      const auto predictions = infer_corpus(checkpoint, corpus, inference);
      write_json_file(infer_out, predictions_to_json(predictions));
      for (const auto& p : predictions)
        if (p.error) std::cerr << "warning: pair '" << p.id << "' failed: " << *p.error << '\n';
    } else if (oracle_cmd->parsed()) {
      const auto corpus = corpus_from_json(read_json_file(oracle_corpus_path), oracle_corpus_path);
      write_json_file(oracle_out, corpus_to_json(oracle_corpus(corpus, limits)));
    } else if (eval_cmd->parsed()) {
      const auto predictions = predictions_from_json(read_json_file(eval_pred), eval_pred);
      const auto gold = corpus_from_json(read_json_file(eval_gold), eval_gold);
      write_json_file(eval_out, evaluate_predictions(predictions, gold));
    } else if (heat_cmd->parsed()) {
      heatmap_for_pair(predictions_from_json(read_json_file(heat_pred), heat_pred), heat_pair, heat_out);
    }
  } catch (const NumericError& e) {
    return report("numeric", e, kNumeric);
  } catch (const std::invalid_argument& e) {
    return report("usage", e, kUsage);
  } catch (const std::exception& e) {
    return report("data", e, kData);
  }
  return kOk;
}
