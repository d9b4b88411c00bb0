#include "smt_analogy/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace smt_analogy {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: size mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::int64_t positives = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] != 0) {
        positive_rank_sum += mean_rank;
        ++positives;
      }
    i = j;
  }
  const auto negatives = static_cast<std::int64_t>(scores.size()) - positives;
  if (positives == 0 || negatives == 0) return 0.5;
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

namespace {

Metrics from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn, double auc) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  const auto total = tp + fp + tn + fn;
  m.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.roc_auc = auc;
  return m;
}

}  // namespace

void MetricsAccumulator::add(const Eigen::MatrixXd& scores, const Eigen::MatrixXi& pred, const Eigen::MatrixXi& gold) {
  if (scores.rows() != gold.rows() || scores.cols() != gold.cols() || pred.rows() != gold.rows() ||
      pred.cols() != gold.cols())
    throw std::invalid_argument("compute_metrics: shape mismatch");
  for (Eigen::Index j = 0; j < gold.cols(); ++j)
    for (Eigen::Index i = 0; i < gold.rows(); ++i) {
      const bool g = gold(i, j) != 0;
      const bool p = pred(i, j) != 0;
      if (g && p) ++tp_;
      if (!g && p) ++fp_;
      if (!g && !p) ++tn_;
      if (g && !p) ++fn_;
      scores_.push_back(scores(i, j));
      labels_.push_back(g ? 1 : 0);
    }
}

Metrics MetricsAccumulator::result() const { return from_counts(tp_, fp_, tn_, fn_, roc_auc(scores_, labels_)); }

Metrics compute_metrics(const Eigen::MatrixXd& scores, const Eigen::MatrixXi& pred, const Eigen::MatrixXi& gold) {
  MetricsAccumulator acc;
  acc.add(scores, pred, gold);
  return acc.result();
}

}  // namespace smt_analogy
