#include "smt_analogy/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace smt_analogy {

namespace {

[[noreturn]] void schema_error(const std::string& context, const std::string& what) {
  throw DataError(context + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& context) {
  if (!j.is_object()) schema_error(context, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(context, std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get_as(const json& j, const char* key, const std::string& context) {
  const json& v = field(j, key, context);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    schema_error(context + "." + key, "unexpected type");
  }
}

void check_version(const json& j, const std::string& context) {
  const json& v = field(j, "version", context);
  const bool ok = (v.is_number_integer() && v.get<int>() == kFormatVersion) ||
                  (v.is_string() && v.get<std::string>() == std::to_string(kFormatVersion));
  if (!ok) schema_error(context, "unsupported version " + v.dump());
}

const json& array_field(const json& j, const char* key, const std::string& context) {
  const json& v = field(j, key, context);
  if (!v.is_array()) schema_error(context + "." + key, "expected an array");
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json int_matrix_to_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_array()) schema_error(context, "expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 && j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      schema_error(context, "ragged matrix at row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) schema_error(context, "non-numeric entry");
      m(r, c) = v.get<Scalar>();
    }
  }
  return m;
}

}  // namespace

json graph_to_json(const SmtDag& dag) {
  json nodes = json::array();
  for (const auto& n : dag.nodes())
    nodes.push_back({{"id", n.id}, {"kind", std::string(to_string(n.kind))}, {"signature", n.signature}});
  json edges = json::array();
  for (const auto& e : dag.edges()) edges.push_back({{"src", e.src}, {"dst", e.dst}, {"pos", e.pos}});
  return {{"id", dag.id()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

SmtDag graph_from_json(const json& j, const std::string& context) {
  const auto id = get_as<std::string>(j, "id", context);
  const std::string where = context + "[" + id + "]";
  std::vector<SmtNode> nodes;
  for (const auto& n : array_field(j, "nodes", where)) {
    const auto kind_text = get_as<std::string>(n, "kind", where + ".nodes");
    const auto kind = parse_node_kind(kind_text);
    if (!kind) schema_error(where + ".nodes", "unknown node kind '" + kind_text + "'");
    nodes.push_back({get_as<int>(n, "id", where + ".nodes"), *kind, get_as<std::string>(n, "signature", where + ".nodes")});
  }
  // Files may list nodes in any order; ids are checked by validate_dag.
  std::stable_sort(nodes.begin(), nodes.end(), [](const SmtNode& a, const SmtNode& b) { return a.id < b.id; });
  std::vector<Edge> edges;
  for (const auto& e : array_field(j, "edges", where))
    edges.push_back({get_as<int>(e, "src", where + ".edges"), get_as<int>(e, "dst", where + ".edges"),
                     get_as<int>(e, "pos", where + ".edges")});
  SmtDag dag(id, std::move(nodes), std::move(edges));
  const auto report = validate_dag(dag);
  if (!report.empty()) schema_error(where, report.front().message);
  return dag;
}

Corpus Corpus::from_instances(const std::vector<AnalogyInstance>& instances) {
  Corpus corpus;
  std::set<std::string> seen;
  auto add_graph = [&](const SmtDag& g) {
    if (seen.insert(g.id()).second) corpus.graphs.push_back(g);
  };
  for (const auto& inst : instances) {
    add_graph(inst.base);
    add_graph(inst.target);
    corpus.pairs.push_back({inst.id, inst.base.id(), inst.target.id(), inst.gold});
  }
  return corpus;
}

const SmtDag& Corpus::graph(const std::string& id) const {
  for (const auto& g : graphs)
    if (g.id() == id) return g;
  throw DataError("corpus: unknown graph id '" + id + "'");
}

std::vector<AnalogyInstance> Corpus::instances() const {
  std::map<std::string, const SmtDag*> by_id;
  for (const auto& g : graphs) by_id[g.id()] = &g;
  std::vector<AnalogyInstance> out;
  for (const auto& p : pairs) {
    const auto b = by_id.find(p.base);
    const auto t = by_id.find(p.target);
    if (b == by_id.end() || t == by_id.end())
      throw DataError("corpus: pair '" + p.id + "' references an unknown graph");
    AnalogyInstance inst{p.id, *b->second, *t->second, p.gold};
    try {
      validate_instance(inst);
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("corpus: ") + e.what());
    }
    out.push_back(std::move(inst));
  }
  return out;
}

json corpus_to_json(const Corpus& corpus) {
  json graphs = json::array();
  for (const auto& g : corpus.graphs) graphs.push_back(graph_to_json(g));
  json pairs = json::array();
  for (const auto& p : corpus.pairs) {
    json gold = nullptr;
    if (p.gold) {
      gold = json::array();
      for (const auto& [b, t] : *p.gold) gold.push_back({b, t});
    }
    pairs.push_back({{"id", p.id}, {"base", p.base}, {"target", p.target}, {"gold", std::move(gold)}});
  }
  return {{"version", kFormatVersion}, {"graphs", std::move(graphs)}, {"pairs", std::move(pairs)}};
}

Corpus corpus_from_json(const json& j, const std::string& context) {
  check_version(j, context);
  Corpus corpus;
  std::set<std::string> ids;
  for (const auto& g : array_field(j, "graphs", context)) {
    corpus.graphs.push_back(graph_from_json(g, context + ".graphs"));
    if (!ids.insert(corpus.graphs.back().id()).second)
      schema_error(context, "duplicate graph id '" + corpus.graphs.back().id() + "'");
  }
  for (const auto& p : array_field(j, "pairs", context)) {
    Corpus::PairRef ref{get_as<std::string>(p, "id", context + ".pairs"),
                        get_as<std::string>(p, "base", context + ".pairs"),
                        get_as<std::string>(p, "target", context + ".pairs"), std::nullopt};
    const auto it = p.find("gold");
    if (it != p.end() && !it->is_null()) {
      if (!it->is_array()) schema_error(context + ".pairs[" + ref.id + "]", "gold must be an array or null");
      std::vector<Correspondence> gold;
      for (const auto& pair : *it) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
          schema_error(context + ".pairs[" + ref.id + "]", "gold entries must be [base, target] integer pairs");
        gold.emplace_back(pair[0].get<int>(), pair[1].get<int>());
      }
      ref.gold = std::move(gold);
    }
    if (!ids.count(ref.base) || !ids.count(ref.target))
      schema_error(context + ".pairs[" + ref.id + "]", "references an unknown graph");
    corpus.pairs.push_back(std::move(ref));
  }
  return corpus;
}

json checkpoint_to_json(const Checkpoint& checkpoint) {
  const auto& c = checkpoint.config;
  json config = {{"layers", c.layers},
                 {"hidden", c.hidden},
                 {"dim", c.dim},
                 {"margin", c.margin},
                 {"learning_rate", c.learning_rate},
                 {"steps", c.steps},
                 {"batch_size", c.batch_size},
                 {"pool_positives", c.pool_positives},
                 {"pool_negatives", c.pool_negatives},
                 {"seed", c.seed},
                 {"signature_dim", checkpoint.signature_dim},
                 {"input_dim", checkpoint.params.input_dim()}};
  json weights = json::object();
  for (const auto& slot : checkpoint.params.slots())
    weights[slot.name] = matrix_to_json(checkpoint.params.tensor(slot.name));
  return {{"version", kFormatVersion},
          {"config", std::move(config)},
          {"vocab_seed", checkpoint.vocab_seed},
          {"weights", std::move(weights)}};
}

Checkpoint checkpoint_from_json(const json& j, const std::string& context) {
  check_version(j, context);
  const json& c = field(j, "config", context);
  const std::string where = context + ".config";
  Checkpoint out;
  out.config.layers = get_as<int>(c, "layers", where);
  out.config.hidden = get_as<int>(c, "hidden", where);
  out.config.dim = get_as<int>(c, "dim", where);
  out.config.margin = get_as<double>(c, "margin", where);
  out.config.learning_rate = get_as<double>(c, "learning_rate", where);
  out.config.steps = get_as<int>(c, "steps", where);
  out.config.batch_size = get_as<int>(c, "batch_size", where);
  out.config.pool_positives = get_as<int>(c, "pool_positives", where);
  out.config.pool_negatives = get_as<int>(c, "pool_negatives", where);
  out.config.seed = get_as<std::uint64_t>(c, "seed", where);
  out.signature_dim = get_as<int>(c, "signature_dim", where);
  out.vocab_seed = get_as<std::uint64_t>(j, "vocab_seed", context);
  try {
    out.config.validate();
  } catch (const std::invalid_argument& e) {
    schema_error(where, e.what());
  }
  const int input_dim = get_as<int>(c, "input_dim", where);
  if (input_dim != feature_dim(out.signature_dim)) schema_error(where, "input_dim does not match signature_dim");
  out.params = EncoderParams(input_dim, out.config.hidden, out.config.dim, out.config.layers);
  const json& weights = field(j, "weights", context);
  for (const auto& slot : out.params.slots()) {
    const auto m = matrix_from_json<double>(field(weights, slot.name.c_str(), context + ".weights"),
                                            context + ".weights." + slot.name);
    if (m.rows() != slot.rows || m.cols() != slot.cols)
      schema_error(context + ".weights." + slot.name, "shape does not match the configuration");
    out.params.tensor(slot.name) = m;
  }
  if (!out.params.all_finite()) schema_error(context, "non-finite weights");
  return out;
}

json predictions_to_json(const std::vector<PairPrediction>& predictions) {
  json pairs = json::array();
  for (const auto& p : predictions) {
    json candidates = json::array();
    for (const auto& c : p.candidates) candidates.push_back({{"base", c.base}, {"anchors", c.anchors}});
    json entry = {{"id", p.id},
                  {"scores", matrix_to_json(p.scores)},
                  {"binary", int_matrix_to_json(p.binary)},
                  {"objective_trace", p.objective_trace},
                  {"candidates", std::move(candidates)}};
    if (p.error) entry["error"] = *p.error;
    pairs.push_back(std::move(entry));
  }
  return {{"version", kFormatVersion}, {"pairs", std::move(pairs)}};
}

std::vector<PairPrediction> predictions_from_json(const json& j, const std::string& context) {
  check_version(j, context);
  std::vector<PairPrediction> out;
  for (const auto& p : array_field(j, "pairs", context)) {
    PairPrediction pred;
    pred.id = get_as<std::string>(p, "id", context + ".pairs");
    const std::string where = context + ".pairs[" + pred.id + "]";
    pred.scores = matrix_from_json<double>(field(p, "scores", where), where + ".scores");
    pred.binary = matrix_from_json<int>(field(p, "binary", where), where + ".binary");
    pred.objective_trace = get_as<std::vector<double>>(p, "objective_trace", where);
    for (const auto& c : array_field(p, "candidates", where))
      pred.candidates.push_back({get_as<int>(c, "base", where + ".candidates"),
                                 get_as<std::vector<int>>(c, "anchors", where + ".candidates")});
    if (const auto it = p.find("error"); it != p.end() && it->is_string()) pred.error = it->get<std::string>();
    if (!pred.error && (pred.scores.rows() != pred.binary.rows() || pred.scores.cols() != pred.binary.cols()))
      schema_error(where, "scores and binary shapes differ");
    out.push_back(std::move(pred));
  }
  return out;
}

json metrics_to_json(const Metrics& m) {
  return {{"accuracy", m.accuracy}, {"recall", m.recall}, {"precision", m.precision}, {"f1", m.f1},
          {"roc_auc", m.roc_auc},   {"tp", m.tp},         {"fp", m.fp},               {"tn", m.tn},
          {"fn", m.fn}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError(path.string() + ": cannot open file");
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
    throw DataError(path.string() + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError(path.string() + ": cannot open for writing");
  file << j.dump(2) << '\n';
  if (!file) throw DataError(path.string() + ": write failed");
}

}  // namespace smt_analogy
