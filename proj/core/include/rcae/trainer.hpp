#pragma once

#include <string>
#include <vector>

#include "rcae/data.hpp"
#include "rcae/losses.hpp"
#include "rcae/net.hpp"
#include "rcae/optim.hpp"
#include "rcae/rng.hpp"

namespace rcae {

/// Hyperparameters of the alternating algorithm. Field names follow the
/// algorithm's notation. Defaults are the paper-scale values; desk-scale
/// runs override T, M and the inner-loop caps.
struct TrainConfig {
  int m = 20;            // minibatch size
  double lambda = 10.0;  // soft-rank weight
  double gamma = 0.5;    // curvature weight
  double sigma = 0.8;    // perturbation std-dev
  double alpha = 0.001;  // Adam step size
  double beta1 = 0.9;
  double beta2 = 0.999;
  int T = 1000;  // outer rounds
  int M = 1000;  // anchor count
  int k = 5;     // target rank
  CurvatureKind curvature_mode = CurvatureKind::kKappa1;
  bool kappa_n2_normalization = false;
  int inner_max_epochs = 50;
  double inner_tol = 1e-4;
  uint64_t seed = 0;

  void validate(int dataset_size, int ambient_dim, int code_dim) const;
  CurvatureMode curvature() const { return {curvature_mode, sigma, kappa_n2_normalization}; }
  ObjectiveConfig objective_config() const { return {gamma, lambda, curvature()}; }
};

/// Key = value config file mirroring TrainConfig field names; '#' comments.
TrainConfig parse_train_config(const std::string& path, TrainConfig base = {});
void write_train_config(const TrainConfig& c, const std::string& path);

struct RoundRecord {
  int round = 0;  // 1-based
  int epochs_used = 0;
  std::vector<double> epoch_mean_loss;
  // Objective breakdown at theta_t, before and after the B-update.
  double f_before_bstep = 0.0;
  double f_after_bstep = 0.0;
  double recon_term = 0.0;
  double kappa_term_value = 0.0;
  double rank_term_before = 0.0;
  double rank_term_after = 0.0;
  // Singular values of J_g at each anchor, at theta_t.
  std::vector<Vec> anchor_spectra;
  long kappa2_guard_count = 0;  // inner-loop guard events this round
  double wall_clock_sec = 0.0;
};

struct TrainReport {
  std::vector<int> anchor_indices;
  std::vector<RoundRecord> rounds;
  long total_steps = 0;
  long kappa2_guard_total = 0;

  /// Mean sigma_{k+1}/sigma_1 over anchors at the final round.
  double final_residual_ratio(int k) const;
  /// JSON without wall-clock timing; identical across reruns of the same
  /// seeded configuration.
  std::string deterministic_json() const;
  void write_json(const std::string& path) const;
  /// rounds.csv (per-round summary) and epochs.csv (per-epoch loss trace).
  void write_csv_traces(const std::string& directory) const;
};

/// Full optimization state, serializable for resume.
struct TrainState {
  AutoencoderNet net;
  AdamState adam;
  RankTargets targets;
  int rounds_done = 0;
  TrainReport report;
};

/// Eckart-Young update of every anchor target: B_j = best rank-k
/// approximation of J_g(x_j). Uses the QR-based product SVD when the code
/// dimension is below the ambient dimension.
RankTargets update_rank_targets(const AutoencoderNet& net, const Dataset& dataset,
                                const std::vector<int>& anchors, int k);

struct InnerResult {
  int epochs_used = 0;
  std::vector<double> epoch_mean_loss;
  long steps = 0;
  long kappa2_guard_count = 0;
};

/// Minibatch Adam minimization of the round loss. Stops when the relative
/// change of the epoch-mean loss over a 5-epoch window drops below
/// inner_tol, or at inner_max_epochs. Sampling consumes exactly three draws
/// per step from the supplied stream (batch, noise, anchor picks) so that
/// trajectories are reproducible.
InnerResult inner_minimize(AutoencoderNet& net, const Dataset& dataset, const RankTargets& targets,
                           const TrainConfig& config, AdamState& adam, Rng& rng);

struct TrainResult {
  AutoencoderNet net;
  TrainReport report;
  AdamState adam;       // final optimizer state
  RankTargets targets;  // final rank targets
  int rounds_done = 0;

  TrainState to_state() const;
};

/// Algorithm: anchors drawn once, targets initialized to zero, then T
/// alternations of inner Adam minimization and the truncated-SVD B-update.
TrainResult train(const Dataset& dataset, const AutoencoderNet& net_init, const TrainConfig& config);

/// Contractive baseline: reconstruction + gamma * (encoder-Jacobian norm +
/// encoder-Jacobian stochastic difference), no rank penalty; same optimizer,
/// sampling and stopping rules as train().
TrainResult train_cae_h_baseline(const Dataset& dataset, const AutoencoderNet& net_init,
                                 const TrainConfig& config);

void save_train_state(const TrainState& s, const TrainConfig& c, const std::string& path);
TrainState load_train_state(const std::string& path, TrainConfig* config_out = nullptr);

/// Resume a partial run; continues the same seeded trajectory the full run
/// would have taken.
TrainResult train_resume(const Dataset& dataset, TrainState state, const TrainConfig& config);

}  // namespace rcae
