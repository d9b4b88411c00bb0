#include "smt_analogy/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smt_analogy {

namespace {

// Shortest-augmenting-path Hungarian method with potentials, for
// rows <= cols. Minimizes cost; returns the column of every row.
std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(m + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(m + 1), 0), way(static_cast<std::size_t>(m + 1), 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m + 1), kInf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j)
    if (p[static_cast<std::size_t>(j)] > 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

// Optimal weight of the sub-problem on the given rows and columns, rows <= cols.
double best_weight(const Eigen::MatrixXd& w, const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.empty()) return 0.0;
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = -w(rows[r], cols[c]);
  const auto a = hungarian_min(cost);
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) total += w(rows[r], cols[static_cast<std::size_t>(a[r])]);
  return total;
}

// rows <= cols.
std::vector<int> solve_wide(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  const int m = static_cast<int>(w.cols());
  std::vector<int> all_rows(static_cast<std::size_t>(n)), all_cols(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) all_rows[static_cast<std::size_t>(i)] = i;
  for (int j = 0; j < m; ++j) all_cols[static_cast<std::size_t>(j)] = j;
  const double optimum = best_weight(w, all_rows, all_cols);
  const double slack = 1e-12 * std::max(1.0, std::abs(optimum)) * std::max(1, n);

  // Fix rows one at a time to the smallest column that keeps the optimum.
  std::vector<int> result(static_cast<std::size_t>(n), -1);
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  double fixed = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> rest_rows;
    for (int r = i + 1; r < n; ++r) rest_rows.push_back(r);
    for (int j = 0; j < m; ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      std::vector<int> rest_cols;
      for (int c = 0; c < m; ++c)
        if (!taken[static_cast<std::size_t>(c)] && c != j) rest_cols.push_back(c);
      const double total = fixed + w(i, j) + best_weight(w, rest_rows, rest_cols);
      if (total >= optimum - slack) {
        result[static_cast<std::size_t>(i)] = j;
        taken[static_cast<std::size_t>(j)] = 1;
        fixed += w(i, j);
        break;
      }
    }
  }
  return result;
}

}  // namespace

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights) {
  const auto rows = weights.rows();
  const auto cols = weights.cols();
  if (rows == 0) return {};
  if (cols == 0) return std::vector<int>(static_cast<std::size_t>(rows), -1);
  if (rows <= cols) return solve_wide(weights);

  // Tall: solved on the transpose, so ties go to the smallest row per column.
  const Eigen::MatrixXd t = weights.transpose();
  const auto by_col = solve_wide(t);
  std::vector<int> result(static_cast<std::size_t>(rows), -1);
  for (std::size_t c = 0; c < by_col.size(); ++c)
    if (by_col[c] >= 0) result[static_cast<std::size_t>(by_col[c])] = static_cast<int>(c);
  return result;
}

double assignment_weight(const Eigen::MatrixXd& weights, const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    if (assignment[r] >= 0) total += weights(static_cast<Eigen::Index>(r), assignment[r]);
  return total;
}

}  // namespace smt_analogy
