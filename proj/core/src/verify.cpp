#include "rcae/verify.hpp"

#include <cmath>
#include <cstdio>

#include "rcae/geometry.hpp"
#include "rcae/losses.hpp"
#include "rcae/rng.hpp"
#include "rcae/svd.hpp"

namespace rcae::verify {

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

void print_results(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    std::printf("%s %s: observed %.6g, tolerance %.6g%s%s\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.observed, r.tolerance, r.detail.empty() ? "" : " -- ",
                r.detail.c_str());
  }
}

std::vector<CheckResult> eckart_young_checks(int trials, uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed);
  double worst = 0.0;
  int instances = 0;
  for (int t = 0; t < trials; ++t) {
    const int rows = 1 + static_cast<int>(rng.uniform_int(12));
    const int cols = 1 + static_cast<int>(rng.uniform_int(12));
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = rng.uniform(-2.0, 2.0);
    const double tol = 1e-9 * (1.0 + a.frobenius_norm_sq());
    for (int k = 0; k <= std::min(rows, cols); ++k) {
      const double anti = kyfan_antinorm_sq(a, k);
      const double resid = (a - truncate_rank(a, k)).frobenius_norm_sq();
      const double err = std::abs(anti - resid);
      worst = std::max(worst, err / tol);
      ++instances;
    }
  }
  CheckResult r;
  r.name = "eckart-young identity (" + std::to_string(trials) + " matrices, " +
           std::to_string(instances) + " (A,k) pairs)";
  r.observed = worst;  // in units of the per-instance tolerance
  r.tolerance = 1.0;
  r.pass = worst < 1.0;
  out.push_back(std::move(r));
  return out;
}

namespace {

double loss_value(const AutoencoderNet& net,
                  const std::function<ad::NodeId(ad::Tape&, TapeNet&)>& build_loss) {
  ad::Tape tape;
  TapeNet tn(tape, net);
  return tape.scalar(build_loss(tape, tn));
}

struct GradCase {
  std::string name;
  std::function<ad::NodeId(ad::Tape&, TapeNet&)> build;
};

AutoencoderNet seeded_small_net(uint64_t seed, Rng& shape_rng) {
  const int n = 3 + static_cast<int>(shape_rng.uniform_int(3));   // 3..5
  const int h = 4 + static_cast<int>(shape_rng.uniform_int(3));   // 4..6
  const int d = 1 + static_cast<int>(shape_rng.uniform_int(n));   // 1..n
  return make_autoencoder_mirrored(n, {h}, d, seed);
}

}  // namespace

double max_gradient_rel_err(const AutoencoderNet& net,
                            const std::function<ad::NodeId(ad::Tape&, TapeNet&)>& build_loss,
                            double step) {
  const LossEval le = loss_gradient(net, build_loss);
  double worst = 0.0;
  AutoencoderNet probe = net;
  for (size_t i = 0; i < net.theta.size(); ++i) {
    const double orig = probe.theta[i];
    probe.theta[i] = orig + step;
    const double fp = loss_value(probe, build_loss);
    probe.theta[i] = orig - step;
    const double fm = loss_value(probe, build_loss);
    probe.theta[i] = orig;
    const double fd = (fp - fm) / (2.0 * step);
    const double a = le.gradient[i];
    const double rel = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
    worst = std::max(worst, rel);
  }
  return worst;
}

std::vector<CheckResult> gradient_checks(int net_count, uint64_t seed) {
  std::vector<CheckResult> out;
  const Rng base(seed);
  constexpr double kTol = 1e-4;

  for (int t = 0; t < net_count; ++t) {
    Rng shape_rng = base.derive(100 + static_cast<uint64_t>(t));
    const AutoencoderNet net = seeded_small_net(base.derive(200 + t).seed(), shape_rng);
    const int n = net.ambient_dim();

    Rng data_rng = base.derive(300 + static_cast<uint64_t>(t));
    std::vector<Vec> batch;
    for (int i = 0; i < 3; ++i) batch.push_back(data_rng.uniform_vec(n, -1.0, 1.0));
    std::vector<Vec> noise;
    for (int i = 0; i < 3; ++i) noise.push_back(data_rng.normal_vec(n, 0.5));

    // Rank targets: truncations of random matrices at the first two batch points.
    std::vector<Matrix> target_store;
    for (int i = 0; i < 2; ++i) {
      Matrix b(n, n);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) b(p, q) = data_rng.uniform(-1.0, 1.0);
      target_store.push_back(truncate_rank(b, std::max(1, n / 2)));
    }
    const std::vector<Vec> rank_points{batch[0], batch[1]};
    std::vector<const Matrix*> rank_targets{&target_store[0], &target_store[1]};

    std::vector<GradCase> cases;
    cases.push_back({"reconstruction", [&](ad::Tape& tp, TapeNet& tn) {
                       return build_reconstruction(tp, tn, batch);
                     }});
    for (const auto kind : {CurvatureKind::kKappa0, CurvatureKind::kKappa1, CurvatureKind::kKappa2}) {
      const char* kn = kind == CurvatureKind::kKappa0   ? "kappa0"
                       : kind == CurvatureKind::kKappa1 ? "kappa1"
                                                        : "kappa2";
      cases.push_back({kn, [&, kind](ad::Tape& tp, TapeNet& tn) {
                         return build_kappa(tp, tn, batch, {kind, 0.5}, noise, nullptr);
                       }});
    }
    cases.push_back({"rank-penalty", [&](ad::Tape& tp, TapeNet& tn) {
                       return build_rank_penalty(tp, tn, rank_points, rank_targets);
                     }});
    for (const auto kind : {CurvatureKind::kKappa0, CurvatureKind::kKappa1, CurvatureKind::kKappa2}) {
      const char* kn = kind == CurvatureKind::kKappa0   ? "objective-kappa0"
                       : kind == CurvatureKind::kKappa1 ? "objective-kappa1"
                                                        : "objective-kappa2";
      cases.push_back({kn, [&, kind](ad::Tape& tp, TapeNet& tn) {
                         const ad::NodeId recon = build_reconstruction(tp, tn, batch);
                         const ad::NodeId kap = build_kappa(tp, tn, batch, {kind, 0.5}, noise, nullptr);
                         const ad::NodeId rank = build_rank_penalty(tp, tn, rank_points, rank_targets);
                         return tp.add(tp.add(recon, tp.scale(kap, 0.7)), tp.scale(rank, 0.9));
                       }});
    }

    for (const auto& c : cases) {
      CheckResult r;
      r.name = "net" + std::to_string(t) + "/" + c.name;
      r.tolerance = kTol;
      r.observed = max_gradient_rel_err(net, c.build);
      r.pass = r.observed < kTol;
      r.detail = std::to_string(net.param_count()) + " params";
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<CheckResult> sphere_checks(int n, double radius) {
  std::vector<CheckResult> out;
  const SphereMap map(n, radius);
  Vec x(n, 0.0);
  x[0] = 2.0;  // any point away from the origin; the bound is point-independent
  const CurvatureEstimate est = theorem4_bound(map, x);
  CheckResult r;
  r.name = "sphere curvature bound (n=" + std::to_string(n) + ", r=" + std::to_string(radius) + ")";
  r.observed = est.value;
  r.tolerance = 0.05;  // relative
  const double expected = 1.0 / radius;
  r.pass = std::abs(est.value - expected) <= 0.05 * expected;
  r.detail = "expected " + std::to_string(expected) + ", scale " + std::to_string(est.epsilon_scale);
  out.push_back(std::move(r));
  return out;
}

std::vector<CheckResult> theorem5_checks(int trials, uint64_t seed) {
  std::vector<CheckResult> out;
  const Rng base(seed);
  int made = 0;
  uint64_t attempt = 0;
  while (made < trials && attempt < static_cast<uint64_t>(trials) * 50) {
    ++attempt;
    Rng shape_rng = base.derive(1000 + attempt);
    const int n = 4 + static_cast<int>(shape_rng.uniform_int(2));  // 4..5
    const int h = 5 + static_cast<int>(shape_rng.uniform_int(2));  // 5..6
    const int d = 2 + static_cast<int>(shape_rng.uniform_int(2));  // 2..3
    const AutoencoderNet net = make_autoencoder_mirrored(n, {h}, d, base.derive(2000 + attempt).seed());
    Rng point_rng = base.derive(3000 + attempt);
    const Vec x = point_rng.uniform_vec(n, -1.0, 1.0);

    const Vec code = forward(net, x).code;
    const Matrix jd = decoder_input_jacobian(net, code);
    const SvdFactors f = svd(jd);
    if (f.singular_values[d - 1] <= 0.1) continue;  // rank-deficient decoder, resample

    const FullNetMap g(net);
    const EncoderMap e(net);
    const DecoderMap dm(net);
    const auto scales = default_scale_ladder();
    const auto dirs = default_directions(n);
    const double lhs = theorem4_bound(g, x, scales, dirs).value;
    const double rhs = theorem5_rhs(e, dm, x, scales, dirs);

    CheckResult r;
    r.name = "theorem5 pair " + std::to_string(made);
    r.observed = lhs - rhs;
    r.tolerance = 1e-3;
    r.pass = lhs <= rhs + 1e-3;
    r.detail = "lhs " + std::to_string(lhs) + ", rhs " + std::to_string(rhs);
    out.push_back(std::move(r));
    ++made;
  }
  if (made < trials) {
    CheckResult r;
    r.name = "theorem5 instance generation";
    r.pass = false;
    r.detail = "could not generate enough well-conditioned pairs";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rcae::verify
