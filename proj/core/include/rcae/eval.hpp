#pragma once

#include <functional>
#include <vector>

#include "rcae/data.hpp"
#include "rcae/net.hpp"

namespace rcae {

/// Generic point map, so metrics accept trained nets and test oracles alike.
using PointMap = std::function<Vec(const Vec&)>;

PointMap net_autoencoder_fn(const AutoencoderNet& net);
PointMap net_encoder_fn(const AutoencoderNet& net);
PointMap identity_fn();

/// Monte-Carlo manifold-quality metrics on fresh Stiefel draws.
/// e1: mean max-norm distance of reshaped output Gram matrix from I.
/// e2: mean recovery distance normalized by sqrt(n1 n2 delta^2).
/// one_i / zero_i: the diagonal / off-diagonal Gram averages with the
/// verbatim 1/n^2 and 1/(n^2 (n-1)) normalizations, n = n1 n2.
struct StiefelMetrics {
  double e1 = 0.0;
  double e2 = 0.0;
  double one_i = 0.0;
  double zero_i = 0.0;
  int sample_count = 0;
  double se_e1 = 0.0;  // Monte-Carlo standard errors
  double se_e2 = 0.0;
};
StiefelMetrics stiefel_metrics(const PointMap& autoencoder, const StiefelSpec& spec,
                               int eval_samples, uint64_t seed);

/// K-nearest-neighbour accuracy in code space, Euclidean distance, majority
/// vote. References are the train split; queries are the test split, or the
/// train split itself with self-matches excluded when no test split exists.
/// Vote ties resolve to the lowest class id, distance ties to the lowest
/// reference index.
double knn_on_codes(const PointMap& encoder, const Dataset& dataset, int k_neighbors);

struct MtcConfig {
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int m = 20;
  int max_epochs = 50;
  double tol = 1e-4;
  uint64_t seed = 0;
};

/// Softmax classifier p(y = c | x) ∝ exp(w_c . e_theta(x)) whose encoder is
/// initialized from a pre-trained autoencoder and fine-tuned jointly with
/// the class weights.
struct MtcModel {
  AutoencoderNet net;     // decoder half inert; encoder half is the feature map
  Matrix class_weights;   // C x d
  std::vector<int> class_ids;
  double beta = 0.0;
  int tangent_skip_count = 0;  // training points whose basis extraction failed
};

/// Mean cross-entropy over the points, plus beta * sum_i ||W J_e(x) u_i||^2
/// when tangent bases are supplied (one n x k matrix per point, nullptr to
/// skip a point's penalty).
double mtc_loss(const MtcModel& model, const std::vector<Vec>& points,
                const std::vector<int>& labels, const std::vector<const Matrix*>* bases = nullptr,
                int* guard = nullptr);

/// Trains the classifier on the train split. Tangent bases are extracted
/// once from the pre-trained autoencoder (the first k left singular vectors
/// of its Jacobian at each training point) and held fixed.
MtcModel train_mtc(const AutoencoderNet& pretrained, const Dataset& labeled_dataset, double beta,
                   int k, const MtcConfig& config);

struct Classification {
  int class_id;
  Vec probabilities;  // over model.class_ids, sums to 1
};
/// Argmax with ties broken toward the lowest class id.
Classification classify(const MtcModel& model, const Vec& x);

/// Accuracy of classify() over the given indices of a labeled dataset.
double mtc_accuracy(const MtcModel& model, const Dataset& dataset, const std::vector<int>& indices);

}  // namespace rcae
