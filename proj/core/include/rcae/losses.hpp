#pragma once

#include <vector>

#include "rcae/data.hpp"
#include "rcae/net.hpp"

namespace rcae {

enum class CurvatureKind { kKappa0, kKappa1, kKappa2 };

struct CurvatureMode {
  CurvatureKind kind = CurvatureKind::kKappa1;
  double noise_sigma = 0.8;
  /// Optional n^-2 factor on kappa1 (the definition-level variant); the
  /// training loss follows the minibatch pseudocode and leaves it off.
  bool n2_normalization = false;
};

/// Per-anchor rank-k target matrices for the soft rank penalty.
struct RankTargets {
  std::vector<int> anchor_indices;  // distinct dataset indices, sorted
  std::vector<Matrix> matrices;     // one n x n matrix of rank <= k per anchor

  int count() const { return static_cast<int>(anchor_indices.size()); }
  /// Position of a dataset index within the anchor list; throws
  /// std::invalid_argument when absent.
  int position_of(int dataset_index) const;
  static RankTargets zeros(const std::vector<int>& anchors, int dim);
};

/// Mean squared reconstruction error over the batch.
double reconstruction_loss(const AutoencoderNet& net, const std::vector<Vec>& batch);

struct KappaResult {
  double value = 0.0;
  int guard_skips = 0;  // kappa2 denominators below guard, reported not hidden
};

/// Curvature term, mean over the batch, one caller-supplied noise vector per
/// example. kappa0 perturbs the encoder Jacobian, kappa1 the full Jacobian,
/// kappa2 is the normalized Taylor remainder.
KappaResult kappa_term(const AutoencoderNet& net, const std::vector<Vec>& batch,
                       const CurvatureMode& mode, const std::vector<Vec>& noise);

/// Sum over the subsample of ||J_g(x_i) - B_i||_F^2. Every subsample entry
/// must be an anchor index.
double rank_penalty(const AutoencoderNet& net, const Dataset& dataset, const RankTargets& targets,
                    const std::vector<int>& subsample);

struct ObjectiveConfig {
  double gamma = 0.0;
  double lambda = 0.0;
  CurvatureMode curvature;
};

struct ObjectiveBreakdown {
  double total = 0.0;
  double reconstruction = 0.0;
  double kappa = 0.0;      // unweighted mean
  double rank = 0.0;       // unweighted anchor mean
  int kappa2_guard_skips = 0;
};

/// F(theta, <B_j>) with the minibatch-mean conventions: mean reconstruction
/// and curvature over the given points, anchor-mean rank penalty, weights
/// gamma and lambda. Noise must supply one vector per dataset point.
ObjectiveBreakdown objective(const AutoencoderNet& net, const Dataset& dataset,
                             const RankTargets& targets, const ObjectiveConfig& config,
                             const std::vector<Vec>& noise);

// ---- Tape builders (training path) ----
// Each returns the unweighted mean term as a scalar node so callers can
// compose L = recon + gamma * kappa + lambda * rank.

ad::NodeId build_reconstruction(ad::Tape& tape, TapeNet& tn, const std::vector<Vec>& batch);
ad::NodeId build_kappa(ad::Tape& tape, TapeNet& tn, const std::vector<Vec>& batch,
                       const CurvatureMode& mode, const std::vector<Vec>& noise, int* guard_skips);
/// Mean over the supplied points of ||J_g(p) - B||_F^2 with fixed targets.
ad::NodeId build_rank_penalty(ad::Tape& tape, TapeNet& tn, const std::vector<Vec>& points,
                              const std::vector<const Matrix*>& targets);

}  // namespace rcae
