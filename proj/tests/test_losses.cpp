#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcae/losses.hpp"
#include "rcae/rng.hpp"
#include "rcae/svd.hpp"

using namespace rcae;

namespace {

AutoencoderNet linear_net(const Matrix& w_enc, const Matrix& w_dec) {
  AutoencoderNet net;
  net.encoder_layers = {{w_enc.cols(), w_enc.rows(), Activation::kIdentity}};
  net.decoder_layers = {{w_dec.cols(), w_dec.rows(), Activation::kIdentity}};
  for (int i = 0; i < w_enc.rows(); ++i)
    for (int j = 0; j < w_enc.cols(); ++j) net.theta.push_back(w_enc(i, j));
  for (int i = 0; i < w_enc.rows(); ++i) net.theta.push_back(0.0);
  for (int i = 0; i < w_dec.rows(); ++i)
    for (int j = 0; j < w_dec.cols(); ++j) net.theta.push_back(w_dec(i, j));
  for (int i = 0; i < w_dec.rows(); ++i) net.theta.push_back(0.0);
  net.validate();
  return net;
}

AutoencoderNet identity_net(int n) {
  return linear_net(Matrix::identity(n), Matrix::identity(n));
}

Dataset dataset_of(std::vector<Vec> pts) {
  Dataset ds;
  ds.points = std::move(pts);
  return ds;
}

double tape_value(const AutoencoderNet& net,
                  const std::function<ad::NodeId(ad::Tape&, TapeNet&)>& build) {
  ad::Tape tape;
  TapeNet tn(tape, net);
  return tape.scalar(build(tape, tn));
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("reconstruction loss of the identity autoencoder is zero") {
  const AutoencoderNet net = identity_net(3);
  Rng rng(1);
  std::vector<Vec> batch;
  for (int i = 0; i < 5; ++i) batch.push_back(rng.uniform_vec(3, -1, 1));
  CHECK(reconstruction_loss(net, batch) < 1e-28);
}

TEST_CASE("reconstruction loss of a constant-zero net on unit vectors is one") {
  AutoencoderNet net;
  net.encoder_layers = {{3, 2, Activation::kIdentity}};
  net.decoder_layers = {{2, 3, Activation::kIdentity}};
  net.theta.assign(net.param_count(), 0.0);
  net.validate();
  Rng rng(2);
  std::vector<Vec> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(rng.unit_vec(3));
  CHECK(reconstruction_loss(net, batch) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projection to the x-axis on the toy dataset costs about 1/6") {
  // g(x, y) = (x, 0) -- the best code-dim-1 curve for the two-part set.
  Matrix we(1, 2), wd(2, 1);
  we(0, 0) = 1.0;
  wd(0, 0) = 1.0;
  const AutoencoderNet net = linear_net(we, wd);

  Rng rng(3);
  const int n = 20000;
  std::vector<Vec> batch;
  double welford_m = 0.0, welford_s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(-1, 1);
    const double y = rng.uniform(-1, 1);
    const Vec p{x, x > 0 ? y : 0.0};
    batch.push_back(p);
    const double sample = p[1] * p[1];  // squared loss of the projection
    const double d = sample - welford_m;
    welford_m += d / (i + 1);
    welford_s += d * (sample - welford_m);
  }
  const double re = reconstruction_loss(net, batch);
  const double se = std::sqrt(welford_s / (n - 1)) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(re - 1.0 / 6.0) < 3.0 * se);
}

TEST_CASE("kappa0 and kappa1 vanish for linear nets") {
  Rng rng(4);
  Matrix we(2, 3), wd(3, 2);
  for (int i = 0; i < 6; ++i) we(i / 3, i % 3) = rng.uniform(-1, 1);
  for (int i = 0; i < 6; ++i) wd(i / 2, i % 2) = rng.uniform(-1, 1);
  const AutoencoderNet net = linear_net(we, wd);
  std::vector<Vec> batch{{0.1, 0.2, 0.3}, {-0.5, 0.0, 0.4}};
  std::vector<Vec> noise{rng.normal_vec(3, 0.5), rng.normal_vec(3, 0.5)};
  CHECK(kappa_term(net, batch, {CurvatureKind::kKappa0, 0.5}, noise).value < 1e-24);
  CHECK(kappa_term(net, batch, {CurvatureKind::kKappa1, 0.5}, noise).value < 1e-24);
}

TEST_CASE("kappa2 vanishes for affine maps") {
  Rng rng(5);
  Matrix we(2, 3), wd(3, 2);
  for (int i = 0; i < 6; ++i) we(i / 3, i % 3) = rng.uniform(-1, 1);
  for (int i = 0; i < 6; ++i) wd(i / 2, i % 2) = rng.uniform(-1, 1);
  AutoencoderNet net = linear_net(we, wd);
  // Nonzero biases keep the map affine rather than linear.
  net.theta[6] = 0.3;
  net.theta[7] = -0.2;
  std::vector<Vec> batch{{0.1, 0.2, 0.3}};
  std::vector<Vec> noise{rng.normal_vec(3, 0.5)};
  const KappaResult r = kappa_term(net, batch, {CurvatureKind::kKappa2, 0.5}, noise);
  CHECK(r.value < 1e-20);
  CHECK(r.guard_skips == 0);
}

TEST_CASE("kappa1 matches a direct two-jacobian evaluation") {
  const AutoencoderNet net = make_autoencoder_mirrored(3, {5}, 2, 6);
  Rng rng(7);
  std::vector<Vec> batch, noise;
  for (int i = 0; i < 4; ++i) {
    batch.push_back(rng.uniform_vec(3, -1, 1));
    noise.push_back(rng.normal_vec(3, 0.4));
  }
  double direct = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Matrix j0 = input_jacobians(net, batch[i]).full();
    const Matrix j1 = input_jacobians(net, vec_add(batch[i], noise[i])).full();
    direct += (j1 - j0).frobenius_norm_sq();
  }
  direct /= 4.0;
  CHECK(kappa_term(net, batch, {CurvatureKind::kKappa1, 0.4}, noise).value ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("kappa2 guard zeroes degenerate contributions and counts them") {
  // Constant net: J = 0, so ||J eps||^2 is below the guard for every sample.
  AutoencoderNet net;
  net.encoder_layers = {{2, 1, Activation::kIdentity}};
  net.decoder_layers = {{1, 2, Activation::kIdentity}};
  net.theta.assign(net.param_count(), 0.0);
  net.validate();
  Rng rng(8);
  std::vector<Vec> batch{{0.5, 0.5}, {0.1, -0.1}};
  std::vector<Vec> noise{rng.normal_vec(2, 0.5), rng.normal_vec(2, 0.5)};
  const KappaResult r = kappa_term(net, batch, {CurvatureKind::kKappa2, 0.5}, noise);
  CHECK(r.value == 0.0);
  CHECK(r.guard_skips == 2);
}

TEST_CASE("kappa_term requires one noise vector per example") {
  const AutoencoderNet net = make_autoencoder_mirrored(2, {3}, 1, 9);
  CHECK_THROWS_AS(kappa_term(net, {{0.1, 0.2}}, {CurvatureKind::kKappa1, 0.5}, {}),
                  std::invalid_argument);
}

TEST_CASE("rank penalty examples") {
  Rng rng(10);
  Matrix we(2, 3), wd(3, 2);
  for (int i = 0; i < 6; ++i) we(i / 3, i % 3) = rng.uniform(-1, 1);
  for (int i = 0; i < 6; ++i) wd(i / 2, i % 2) = rng.uniform(-1, 1);
  const AutoencoderNet net = linear_net(we, wd);
  const Matrix j = wd * we;

  Dataset ds = dataset_of({{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}, {0.7, 0.8, 0.9}});
  SUBCASE("targets equal to the jacobian give zero") {
    RankTargets t;
    t.anchor_indices = {0, 2};
    t.matrices = {input_jacobians(net, ds.points[0]).full(),
                  input_jacobians(net, ds.points[2]).full()};
    CHECK(rank_penalty(net, ds, t, {0, 2}) < 1e-22);
  }
  SUBCASE("zero targets on a linear net give the closed form") {
    RankTargets t = RankTargets::zeros({0, 1}, 3);
    CHECK(rank_penalty(net, ds, t, {0, 1}) ==
          doctest::Approx(2.0 * j.frobenius_norm_sq()).epsilon(1e-12));
  }
  SUBCASE("non-anchor index is a domain error") {
    RankTargets t = RankTargets::zeros({0, 1}, 3);
    CHECK_THROWS_AS(rank_penalty(net, ds, t, {2}), std::invalid_argument);
  }
}

TEST_CASE("after an exact B-update the penalty is the kyfan antinorm sum") {
  const AutoencoderNet net = make_autoencoder_mirrored(4, {6}, 3, 11);
  Rng rng(12);
  Dataset ds;
  for (int i = 0; i < 5; ++i) ds.points.push_back(rng.uniform_vec(4, -1, 1));
  const std::vector<int> anchors{0, 2, 4};
  const int k = 2;

  RankTargets t;
  t.anchor_indices = anchors;
  double expect = 0.0;
  for (int a : anchors) {
    const Matrix j = input_jacobians(net, ds.points[a]).full();
    t.matrices.push_back(truncate_rank(j, k));
    expect += kyfan_antinorm_sq(j, k);
  }
  CHECK(rank_penalty(net, ds, t, anchors) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("eckart-young update minimizes the rank penalty over rank-k targets") {
  const AutoencoderNet net = make_autoencoder_mirrored(4, {5}, 3, 13);
  Rng rng(14);
  Dataset ds;
  for (int i = 0; i < 4; ++i) ds.points.push_back(rng.uniform_vec(4, -1, 1));
  const std::vector<int> anchors{0, 1, 2, 3};
  const int k = 2;

  RankTargets best;
  best.anchor_indices = anchors;
  double optimal = 0.0;
  for (int a : anchors) {
    const Matrix j = input_jacobians(net, ds.points[a]).full();
    best.matrices.push_back(truncate_rank(j, k));
    optimal += kyfan_antinorm_sq(j, k);
  }
  CHECK(rank_penalty(net, ds, best, anchors) <= optimal * (1 + 1e-8) + 1e-12);

  // Any other rank-k targets do at least as badly.
  for (int trial = 0; trial < 5; ++trial) {
    RankTargets other;
    other.anchor_indices = anchors;
    for (size_t a = 0; a < anchors.size(); ++a) {
      Matrix r(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = rng.uniform(-1, 1);
      other.matrices.push_back(truncate_rank(r, k));
    }
    CHECK(rank_penalty(net, ds, other, anchors) >= optimal - 1e-10);
  }
}

TEST_CASE("objective composes its terms") {
  const AutoencoderNet net = make_autoencoder_mirrored(3, {4}, 2, 15);
  Rng rng(16);
  Dataset ds;
  for (int i = 0; i < 6; ++i) ds.points.push_back(rng.uniform_vec(3, -1, 1));
  std::vector<Vec> noise;
  for (int i = 0; i < 6; ++i) noise.push_back(rng.normal_vec(3, 0.5));

  RankTargets t;
  t.anchor_indices = {1, 4};
  for (int a : t.anchor_indices)
    t.matrices.push_back(truncate_rank(input_jacobians(net, ds.points[a]).full(), 1));

  SUBCASE("gamma = lambda = 0 reduces to the reconstruction loss") {
    ObjectiveConfig cfg{0.0, 0.0, {CurvatureKind::kKappa1, 0.5}};
    const auto b = objective(net, ds, t, cfg, noise);
    CHECK(b.total == doctest::Approx(reconstruction_loss(net, ds.points)).epsilon(1e-14));
  }
  SUBCASE("linear net with kappa1 and lambda = 0 reduces to reconstruction") {
    const AutoencoderNet lin = linear_net(Matrix::identity(3), Matrix::identity(3));
    RankTargets none;
    ObjectiveConfig cfg{0.7, 0.0, {CurvatureKind::kKappa1, 0.5}};
    const auto b = objective(lin, ds, none, cfg, noise);
    CHECK(b.total == doctest::Approx(reconstruction_loss(lin, ds.points)).epsilon(1e-14));
  }
  SUBCASE("full configuration equals the independent term sum") {
    ObjectiveConfig cfg{0.7, 1.3, {CurvatureKind::kKappa1, 0.5}};
    const auto b = objective(net, ds, t, cfg, noise);
    const double expect =
        reconstruction_loss(net, ds.points) +
        0.7 * kappa_term(net, ds.points, cfg.curvature, noise).value +
        1.3 * rank_penalty(net, ds, t, t.anchor_indices) / t.count();
    CHECK(b.total == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("objective does not increase under an exact B-update") {
  const AutoencoderNet net = make_autoencoder_mirrored(3, {5}, 2, 17);
  Rng rng(18);
  Dataset ds;
  for (int i = 0; i < 5; ++i) ds.points.push_back(rng.uniform_vec(3, -1, 1));
  std::vector<Vec> noise;
  for (int i = 0; i < 5; ++i) noise.push_back(rng.normal_vec(3, 0.5));
  const std::vector<int> anchors{0, 2, 3};
  const int k = 1;
  ObjectiveConfig cfg{0.5, 2.0, {CurvatureKind::kKappa1, 0.5}};

  // Arbitrary prior rank-k targets, including zero.
  std::vector<RankTargets> priors;
  priors.push_back(RankTargets::zeros(anchors, 3));
  {
    RankTargets r;
    r.anchor_indices = anchors;
    for (size_t a = 0; a < anchors.size(); ++a) {
      Matrix m(3, 3);
      for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = rng.uniform(-2, 2);
      r.matrices.push_back(truncate_rank(m, k));
    }
    priors.push_back(r);
  }

  RankTargets updated;
  updated.anchor_indices = anchors;
  for (int a : anchors)
    updated.matrices.push_back(truncate_rank(input_jacobians(net, ds.points[a]).full(), k));

  const double f_new = objective(net, ds, updated, cfg, noise).total;
  for (const auto& prior : priors)
    CHECK(f_new <= objective(net, ds, prior, cfg, noise).total + 1e-10);
}

TEST_CASE("terms are invariant under batch permutation") {
  const AutoencoderNet net = make_autoencoder_mirrored(3, {4}, 2, 19);
  Rng rng(20);
  std::vector<Vec> batch, noise;
  for (int i = 0; i < 6; ++i) {
    batch.push_back(rng.uniform_vec(3, -1, 1));
    noise.push_back(rng.normal_vec(3, 0.5));
  }
  std::vector<Vec> batch_r(batch.rbegin(), batch.rend());
  std::vector<Vec> noise_r(noise.rbegin(), noise.rend());
  CHECK(reconstruction_loss(net, batch) ==
        doctest::Approx(reconstruction_loss(net, batch_r)).epsilon(1e-13));
  CHECK(kappa_term(net, batch, {CurvatureKind::kKappa1, 0.5}, noise).value ==
        doctest::Approx(kappa_term(net, batch_r, {CurvatureKind::kKappa1, 0.5}, noise_r).value)
            .epsilon(1e-13));
}

TEST_CASE("tape builders agree with the plain evaluations") {
  const AutoencoderNet net = make_autoencoder_mirrored(3, {5}, 2, 21);
  Rng rng(22);
  std::vector<Vec> batch, noise;
  for (int i = 0; i < 3; ++i) {
    batch.push_back(rng.uniform_vec(3, -1, 1));
    noise.push_back(rng.normal_vec(3, 0.5));
  }
  CHECK(tape_value(net, [&](ad::Tape& t, TapeNet& tn) {
          return build_reconstruction(t, tn, batch);
        }) == doctest::Approx(reconstruction_loss(net, batch)).epsilon(1e-13));

  for (auto kind : {CurvatureKind::kKappa0, CurvatureKind::kKappa1, CurvatureKind::kKappa2}) {
    const CurvatureMode mode{kind, 0.5};
    CHECK(tape_value(net, [&](ad::Tape& t, TapeNet& tn) {
            return build_kappa(t, tn, batch, mode, noise, nullptr);
          }) == doctest::Approx(kappa_term(net, batch, mode, noise).value).epsilon(1e-13));
  }

  Dataset ds = dataset_of(batch);
  RankTargets t;
  t.anchor_indices = {0, 1};
  for (int a : t.anchor_indices)
    t.matrices.push_back(truncate_rank(input_jacobians(net, ds.points[a]).full(), 1));
  std::vector<const Matrix*> mats{&t.matrices[0], &t.matrices[1]};
  std::vector<Vec> pts{ds.points[0], ds.points[1]};
  const double plain = rank_penalty(net, ds, t, t.anchor_indices) / 2.0;
  CHECK(tape_value(net, [&](ad::Tape& tp, TapeNet& tn) {
          return build_rank_penalty(tp, tn, pts, mats);
        }) == doctest::Approx(plain).epsilon(1e-13));
}

TEST_CASE("kappa1 n^-2 normalization flag") {
  const AutoencoderNet net = make_autoencoder_mirrored(3, {4}, 2, 23);
  Rng rng(24);
  std::vector<Vec> batch{rng.uniform_vec(3, -1, 1)};
  std::vector<Vec> noise{rng.normal_vec(3, 0.5)};
  const double plain = kappa_term(net, batch, {CurvatureKind::kKappa1, 0.5, false}, noise).value;
  const double normed = kappa_term(net, batch, {CurvatureKind::kKappa1, 0.5, true}, noise).value;
  CHECK(normed == doctest::Approx(plain / 9.0).epsilon(1e-13));
}

}  // TEST_SUITE
