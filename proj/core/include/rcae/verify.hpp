#pragma once

#include <string>
#include <vector>

#include "rcae/matrix.hpp"
#include "rcae/net.hpp"

namespace rcae::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

bool all_pass(const std::vector<CheckResult>& results);
/// One line per check: "PASS/FAIL name: observed ... tolerance ... detail".
void print_results(const std::vector<CheckResult>& results);

/// |kyfan_antinorm_sq(A, k) - ||A - truncate_rank(A, k)||_F^2| over random
/// matrices with dims up to 12x12 and every valid k; tolerance
/// 1e-9 * (1 + ||A||_F^2) per instance.
std::vector<CheckResult> eckart_young_checks(int trials, uint64_t seed);

/// Central finite-difference checks (step 1e-5) of the analytic
/// theta-gradient for every loss term and the composed objective in all
/// three curvature modes, on seeded nets with at most 500 parameters.
/// Reported value per check is the worst guarded relative error
/// |analytic - fd| / max(1, |analytic|, |fd|); tolerance 1e-4.
std::vector<CheckResult> gradient_checks(int net_count, uint64_t seed);

/// Curvature-bound estimate for the sphere map r * x / ||x||: must land
/// within 5% of 1 / r at the smallest ladder scale, in the given dimension.
std::vector<CheckResult> sphere_checks(int n, double radius);

/// Encoder-decoder bound: numerically estimated LHS <= RHS + 1e-3 on seeded
/// pairs whose decoder Jacobian has smallest singular value above 0.1.
std::vector<CheckResult> theorem5_checks(int trials, uint64_t seed);

/// Worst guarded relative error between the analytic theta-gradient of the
/// loss and central finite differences.
double max_gradient_rel_err(const AutoencoderNet& net,
                            const std::function<ad::NodeId(ad::Tape&, TapeNet&)>& build_loss,
                            double step = 1e-5);

}  // namespace rcae::verify
