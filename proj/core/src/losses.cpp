#include "rcae/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcae {

namespace {
constexpr double kKappa2Guard = 1e-12;  // on ||J eps||^2 relative to ||eps||^2
}

int RankTargets::position_of(int dataset_index) const {
  const auto it = std::lower_bound(anchor_indices.begin(), anchor_indices.end(), dataset_index);
  if (it == anchor_indices.end() || *it != dataset_index)
    throw std::invalid_argument("RankTargets: index " + std::to_string(dataset_index) +
                                " is not an anchor");
  return static_cast<int>(it - anchor_indices.begin());
}

RankTargets RankTargets::zeros(const std::vector<int>& anchors, int dim) {
  RankTargets t;
  t.anchor_indices = anchors;
  std::sort(t.anchor_indices.begin(), t.anchor_indices.end());
  t.matrices.assign(t.anchor_indices.size(), Matrix(dim, dim));
  return t;
}

double reconstruction_loss(const AutoencoderNet& net, const std::vector<Vec>& batch) {
  if (batch.empty()) throw std::invalid_argument("reconstruction_loss: empty batch");
  double s = 0.0;
  for (const Vec& x : batch) {
    const Vec out = forward(net, x).output;
    s += norm_sq(vec_sub(x, out));
  }
  return s / static_cast<double>(batch.size());
}

KappaResult kappa_term(const AutoencoderNet& net, const std::vector<Vec>& batch,
                       const CurvatureMode& mode, const std::vector<Vec>& noise) {
  if (batch.size() != noise.size())
    throw std::invalid_argument("kappa_term: need one noise vector per example");
  if (batch.empty()) throw std::invalid_argument("kappa_term: empty batch");
  KappaResult r;
  double s = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Vec& y = batch[i];
    const Vec yp = vec_add(y, noise[i]);
    switch (mode.kind) {
      case CurvatureKind::kKappa0: {
        const Matrix j0 = input_jacobians(net, y).j_encoder;
        const Matrix j1 = input_jacobians(net, yp).j_encoder;
        s += (j1 - j0).frobenius_norm_sq();
        break;
      }
      case CurvatureKind::kKappa1: {
        const Matrix j0 = input_jacobians(net, y).full();
        const Matrix j1 = input_jacobians(net, yp).full();
        double term = (j1 - j0).frobenius_norm_sq();
        if (mode.n2_normalization) {
          const double n = static_cast<double>(y.size());
          term /= n * n;
        }
        s += term;
        break;
      }
      case CurvatureKind::kKappa2: {
        const Matrix j = input_jacobians(net, y).full();
        const Vec je = j.apply(noise[i]);
        const double den = norm_sq(je);
        if (den < kKappa2Guard * norm_sq(noise[i])) {
          ++r.guard_skips;
          break;
        }
        const Vec g0 = forward(net, y).output;
        const Vec g1 = forward(net, yp).output;
        const Vec rem = vec_sub(vec_sub(g1, g0), je);
        s += norm_sq(rem) / den;
        break;
      }
    }
  }
  r.value = s / static_cast<double>(batch.size());
  return r;
}

double rank_penalty(const AutoencoderNet& net, const Dataset& dataset, const RankTargets& targets,
                    const std::vector<int>& subsample) {
  double s = 0.0;
  for (int idx : subsample) {
    const int pos = targets.position_of(idx);
    const Matrix j = input_jacobians(net, dataset.points[idx]).full();
    s += (j - targets.matrices[pos]).frobenius_norm_sq();
  }
  return s;
}

ObjectiveBreakdown objective(const AutoencoderNet& net, const Dataset& dataset,
                             const RankTargets& targets, const ObjectiveConfig& config,
                             const std::vector<Vec>& noise) {
  ObjectiveBreakdown b;
  std::vector<Vec> batch = dataset.points;
  b.reconstruction = reconstruction_loss(net, batch);
  if (config.gamma != 0.0) {
    const KappaResult kr = kappa_term(net, batch, config.curvature, noise);
    b.kappa = kr.value;
    b.kappa2_guard_skips = kr.guard_skips;
  }
  if (config.lambda != 0.0 && targets.count() > 0) {
    b.rank = rank_penalty(net, dataset, targets, targets.anchor_indices) /
             static_cast<double>(targets.count());
  }
  b.total = b.reconstruction + config.gamma * b.kappa + config.lambda * b.rank;
  return b;
}

namespace {

// sum_i s_i / count as a scalar node
ad::NodeId mean_of(ad::Tape& tape, const std::vector<ad::NodeId>& terms) {
  ad::NodeId acc = terms.front();
  for (size_t i = 1; i < terms.size(); ++i) acc = tape.add(acc, terms[i]);
  return tape.scale(acc, 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

ad::NodeId build_reconstruction(ad::Tape& tape, TapeNet& tn, const std::vector<Vec>& batch) {
  if (batch.empty()) throw std::invalid_argument("build_reconstruction: empty batch");
  std::vector<ad::NodeId> terms;
  terms.reserve(batch.size());
  for (const Vec& x : batch) {
    const auto e = tn.eval(x, /*with_jacobian=*/false);
    const ad::NodeId target = tape.constant(Matrix::column(x));
    terms.push_back(tape.frob_sq(tape.sub(target, e.output)));
  }
  return mean_of(tape, terms);
}

ad::NodeId build_kappa(ad::Tape& tape, TapeNet& tn, const std::vector<Vec>& batch,
                       const CurvatureMode& mode, const std::vector<Vec>& noise, int* guard_skips) {
  if (batch.size() != noise.size())
    throw std::invalid_argument("build_kappa: need one noise vector per example");
  std::vector<ad::NodeId> terms;
  terms.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const Vec& y = batch[i];
    const Vec yp = vec_add(y, noise[i]);
    switch (mode.kind) {
      case CurvatureKind::kKappa0: {
        const auto e0 = tn.eval_encoder(y, true);
        const auto e1 = tn.eval_encoder(yp, true);
        terms.push_back(tape.frob_sq(tape.sub(e1.j_encoder, e0.j_encoder)));
        break;
      }
      case CurvatureKind::kKappa1: {
        const auto e0 = tn.eval(y, true);
        const auto e1 = tn.eval(yp, true);
        ad::NodeId t = tape.frob_sq(tape.sub(e1.j_full, e0.j_full));
        if (mode.n2_normalization) {
          const double n = static_cast<double>(y.size());
          t = tape.scale(t, 1.0 / (n * n));
        }
        terms.push_back(t);
        break;
      }
      case CurvatureKind::kKappa2: {
        const auto e0 = tn.eval(y, true);
        const ad::NodeId eps = tape.constant(Matrix::column(noise[i]));
        const ad::NodeId je = tape.matmul(e0.j_full, eps);
        const double den = tape.value(je).frobenius_norm_sq();
        if (den < kKappa2Guard * norm_sq(noise[i])) {
          if (guard_skips) ++*guard_skips;
          terms.push_back(tape.constant(Matrix(1, 1)));
          break;
        }
        const auto e1 = tn.eval(yp, false);
        const ad::NodeId rem = tape.sub(tape.sub(e1.output, e0.output), je);
        terms.push_back(tape.div(tape.frob_sq(rem), tape.frob_sq(je)));
        break;
      }
    }
  }
  return mean_of(tape, terms);
}

ad::NodeId build_rank_penalty(ad::Tape& tape, TapeNet& tn, const std::vector<Vec>& points,
                              const std::vector<const Matrix*>& targets) {
  if (points.size() != targets.size())
    throw std::invalid_argument("build_rank_penalty: one target per point required");
  if (points.empty()) throw std::invalid_argument("build_rank_penalty: empty");
  std::vector<ad::NodeId> terms;
  terms.reserve(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const auto e = tn.eval(points[i], true);
    const ad::NodeId b = tape.constant(*targets[i]);
    terms.push_back(tape.frob_sq(tape.sub(e.j_full, b)));
  }
  return mean_of(tape, terms);
}

}  // namespace rcae
