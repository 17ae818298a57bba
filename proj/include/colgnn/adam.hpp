#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "colgnn/errors.hpp"
#include "colgnn/tensor.hpp"

namespace colgnn {

// Moment buffers for one parameter list, plus the shared step counter.
struct AdamState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState like(const std::vector<Tensor>& params) {
    AdamState s;
    s.first_moment.reserve(params.size());
    s.second_moment.reserve(params.size());
    for (const Tensor& p : params) {
      s.first_moment.emplace_back(p.shape());
      s.second_moment.emplace_back(p.shape());
    }
    return s;
  }
};

// Classic Adam update with bias correction. Weight decay enters as an L2 term
// added to the gradient before the moment updates.
inline void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
                      AdamState& state, double learning_rate, double weight_decay) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw InvalidInputError("adam_step: parameter, gradient and state counts disagree");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i]) || !params[i].same_shape(state.first_moment[i])) {
      throw InvalidInputError("adam_step: shape mismatch at parameter " + std::to_string(i));
    }
  }
  state.step += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    const Tensor& g = grads[i];
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    for (std::size_t e = 0; e < p.size(); ++e) {
      double grad = g(e) + weight_decay * p(e);
      m(e) = state.beta1 * m(e) + (1.0 - state.beta1) * grad;
      v(e) = state.beta2 * v(e) + (1.0 - state.beta2) * grad * grad;
      double m_hat = m(e) / bc1;
      double v_hat = v(e) / bc2;
      p(e) -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    ensure_finite(p, "adam_step");
  }
}

}  // namespace colgnn
