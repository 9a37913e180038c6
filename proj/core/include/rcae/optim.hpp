#pragma once

#include "rcae/matrix.hpp"

namespace rcae {

/// Adam optimizer state (first/second moment estimates, step counter).
struct AdamState {
  Vec first_moment;
  Vec second_moment;
  long step_count = 0;

  static AdamState zeros(size_t dim) {
    AdamState s;
    s.first_moment.assign(dim, 0.0);
    s.second_moment.assign(dim, 0.0);
    return s;
  }
};

/// One Adam update with standard bias correction:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
///   theta <- theta - alpha * m-hat / (sqrt(v-hat) + 1e-8).
void adam_step(Vec& theta, const Vec& grad, AdamState& state, double alpha, double beta1,
               double beta2);

}  // namespace rcae
