#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace smt_analogy {

struct Metrics {
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.5;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
};

/// Area under the ROC curve from the rank-sum statistic; tied scores count
/// one half. Returns 0.5 when either class is empty.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Every cell is one binary decision against gold; AUC uses the scores.
Metrics compute_metrics(const Eigen::MatrixXd& scores, const Eigen::MatrixXi& pred, const Eigen::MatrixXi& gold);

/// Micro-average over many alignment matrices: counts are pooled and AUC is
/// computed on the pooled cells.
class MetricsAccumulator {
 public:
  void add(const Eigen::MatrixXd& scores, const Eigen::MatrixXi& pred, const Eigen::MatrixXi& gold);
  Metrics result() const;

 private:
  std::int64_t tp_ = 0, fp_ = 0, tn_ = 0, fn_ = 0;
  std::vector<double> scores_;
  std::vector<int> labels_;
};

}  // namespace smt_analogy
