#include "rcae/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace rcae {

void adam_step(Vec& theta, const Vec& grad, AdamState& state, double alpha, double beta1,
               double beta2) {
  if (theta.size() != grad.size() || theta.size() != state.first_moment.size())
    throw std::invalid_argument("adam_step: dimension mismatch");
  constexpr double eps = 1e-8;
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step_count));
  for (size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    state.first_moment[i] = beta1 * state.first_moment[i] + (1.0 - beta1) * g;
    state.second_moment[i] = beta2 * state.second_moment[i] + (1.0 - beta2) * g * g;
    const double mhat = state.first_moment[i] / bc1;
    const double vhat = state.second_moment[i] / bc2;
    theta[i] -= alpha * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace rcae
