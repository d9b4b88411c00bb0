#pragma once

#include <vector>

#include <Eigen/Dense>

namespace smt_analogy {

/// Maximum-weight one-to-one assignment on a rectangular weight matrix.
/// Returns, for every row, the assigned column or -1. min(rows, cols) pairs
/// are always assigned. Among optimal assignments the lexicographically
/// smallest column sequence (row 0 first) is returned.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

/// Total weight of an assignment produced by max_weight_assignment.
double assignment_weight(const Eigen::MatrixXd& weights, const std::vector<int>& assignment);

}  // namespace smt_analogy
