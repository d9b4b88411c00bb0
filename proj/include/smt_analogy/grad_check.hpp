#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "smt_analogy/random.hpp"

namespace smt_analogy {

struct GradCheckResult {
  double max_relative_error = 0.0;
  int worst_index = -1;
  int probes = 0;
  bool finite = true;
};

/// Compares an analytic gradient with central differences
/// (f(x + eps) - f(x - eps)) / 2 eps on randomly chosen coordinates.
///
/// `loss` is evaluated on an extended-precision copy of the point so the
/// difference quotient is not swamped by double round-off; it must accept
/// Eigen::Matrix<long double, Dynamic, 1>. The relative error uses the
/// denominator max(|analytic|, |numeric|, 1e-8).
template <typename Loss>
GradCheckResult grad_check(Loss&& loss, const Eigen::VectorXd& point, const Eigen::VectorXd& analytic, int probes,
                           double eps, std::uint64_t seed = 0) {
  using Extended = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  GradCheckResult result;
  if (!(eps > 0.0) || analytic.size() != point.size()) {
    result.finite = false;
    return result;
  }
  std::vector<int> coords(static_cast<std::size_t>(point.size()));
  std::iota(coords.begin(), coords.end(), 0);
  Rng rng(seed);
  rng.shuffle(coords);
  coords.resize(std::min<std::size_t>(coords.size(), static_cast<std::size_t>(std::max(probes, 0))));

  Extended x = point.cast<long double>();
  for (int i : coords) {
    const long double saved = x[i];
    x[i] = saved + eps;
    const long double up = loss(x);
    x[i] = saved - eps;
    const long double down = loss(x);
    x[i] = saved;
    const double numeric = static_cast<double>((up - down) / (2.0L * static_cast<long double>(eps)));
    const double exact = analytic[i];
    ++result.probes;
    if (!std::isfinite(numeric) || !std::isfinite(exact)) {
      result.finite = false;
      result.max_relative_error = std::numeric_limits<double>::infinity();
      result.worst_index = i;
      continue;
    }
    const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
    const double rel = std::abs(exact - numeric) / denom;
    if (result.finite && (rel > result.max_relative_error || result.worst_index < 0)) {
      result.max_relative_error = rel;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace smt_analogy
