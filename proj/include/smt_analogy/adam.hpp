#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace smt_analogy {

/// Moment accumulators for one dense parameter block.
template <typename PlainObject>
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  PlainObject first;
  PlainObject second;

  explicit AdamState(const PlainObject& like)
      : first(PlainObject::Zero(like.rows(), like.cols())), second(PlainObject::Zero(like.rows(), like.cols())) {}
};

/// One bias-corrected Adam step, in place.
template <typename Derived, typename GradDerived, typename PlainObject>
void adam_step(Eigen::DenseBase<Derived>& params, const Eigen::DenseBase<GradDerived>& grad,
               AdamState<PlainObject>& state, double learning_rate) {
  ++state.step;
  state.first = state.beta1 * state.first + (1.0 - state.beta1) * grad.derived();
  state.second = state.beta2 * state.second + (1.0 - state.beta2) * grad.derived().cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.derived().array() -=
      learning_rate * (state.first.array() / c1) / ((state.second.array() / c2).sqrt() + state.epsilon);
}

}  // namespace smt_analogy
