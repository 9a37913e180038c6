#include "rcae/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rcae/geometry.hpp"
#include "rcae/optim.hpp"
#include "rcae/rng.hpp"

namespace rcae {

PointMap net_autoencoder_fn(const AutoencoderNet& net) {
  return [&net](const Vec& x) { return forward(net, x).output; };
}

PointMap net_encoder_fn(const AutoencoderNet& net) {
  return [&net](const Vec& x) { return forward(net, x).code; };
}

PointMap identity_fn() {
  return [](const Vec& x) { return x; };
}

StiefelMetrics stiefel_metrics(const PointMap& autoencoder, const StiefelSpec& spec,
                               int eval_samples, uint64_t seed) {
  spec.validate();
  if (spec.delta <= 0.0)
    throw std::invalid_argument("stiefel_metrics: delta must be positive (e2 normalization)");
  if (eval_samples <= 0) throw std::invalid_argument("stiefel_metrics: eval_samples must be positive");

  const int n = spec.ambient_dim();
  const double e2_denom = std::sqrt(n * spec.delta * spec.delta);
  Rng point_rng = Rng(seed).derive(11);
  Rng noise_rng = Rng(seed).derive(12);

  double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0, soi = 0.0, szi = 0.0;
  for (int t = 0; t < eval_samples; ++t) {
    const Vec z = flatten_column_major(sample_stiefel_point(spec.n1, spec.n2, point_rng));
    Vec x = z;
    for (double& v : x) v += noise_rng.normal(0.0, spec.delta);
    const Vec out = autoencoder(x);
    if (static_cast<int>(out.size()) != n)
      throw std::invalid_argument("stiefel_metrics: model output dimension mismatch");

    const Matrix a = unflatten_column_major(out, spec.n1, spec.n2);
    const Matrix gram = a.transposed() * a;

    double e1 = 0.0;
    for (int i = 0; i < spec.n2; ++i)
      for (int j = 0; j < spec.n2; ++j)
        e1 = std::max(e1, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
    const double e2 = norm(vec_sub(out, z)) / e2_denom;

    double diag = 0.0, off = 0.0;
    for (int i = 0; i < spec.n2; ++i) diag += gram(i, i);
    for (int i = 0; i < spec.n2; ++i)
      for (int j = 0; j < spec.n2; ++j)
        if (i != j) off += gram(i, j);

    s1 += e1;
    s1sq += e1 * e1;
    s2 += e2;
    s2sq += e2 * e2;
    soi += diag / (static_cast<double>(n) * n);
    szi += off / (static_cast<double>(n) * n * (n - 1));
  }

  StiefelMetrics m;
  m.sample_count = eval_samples;
  const double cnt = static_cast<double>(eval_samples);
  m.e1 = s1 / cnt;
  m.e2 = s2 / cnt;
  m.one_i = soi / cnt;
  m.zero_i = szi / cnt;
  if (eval_samples > 1) {
    m.se_e1 = std::sqrt(std::max(0.0, s1sq / cnt - m.e1 * m.e1) / (cnt - 1.0));
    m.se_e2 = std::sqrt(std::max(0.0, s2sq / cnt - m.e2 * m.e2) / (cnt - 1.0));
  }
  return m;
}

double knn_on_codes(const PointMap& encoder, const Dataset& dataset, int k_neighbors) {
  if (!dataset.has_labels()) throw std::invalid_argument("knn_on_codes: labels required");
  if (k_neighbors < 1) throw std::invalid_argument("knn_on_codes: K must be >= 1");

  const std::vector<int> refs = dataset.effective_train();
  std::vector<int> queries = dataset.test_indices;
  const bool self_exclude = queries.empty();
  if (self_exclude) queries = refs;
  if (refs.empty() || queries.empty())
    throw std::invalid_argument("knn_on_codes: empty reference or query set");

  std::vector<Vec> ref_codes(refs.size());
  for (size_t i = 0; i < refs.size(); ++i) ref_codes[i] = encoder(dataset.points[refs[i]]);

  const int k = std::min<int>(k_neighbors, static_cast<int>(refs.size()) - (self_exclude ? 1 : 0));
  if (k < 1) throw std::invalid_argument("knn_on_codes: no usable references");

  int correct = 0;
  std::vector<std::pair<double, int>> dists;
  for (int q : queries) {
    const Vec qc = encoder(dataset.points[q]);
    dists.clear();
    for (size_t r = 0; r < refs.size(); ++r) {
      if (self_exclude && refs[r] == q) continue;
      dists.emplace_back(norm_sq(vec_sub(qc, ref_codes[r])), refs[r]);
    }
    std::partial_sort(dists.begin(), dists.begin() + k, dists.end());

    std::map<int, int> votes;
    for (int i = 0; i < k; ++i) ++votes[dataset.labels[dists[i].second]];
    int best_class = votes.begin()->first;
    int best_count = votes.begin()->second;
    for (const auto& [cls, cnt] : votes)
      if (cnt > best_count) {  // ties keep the lowest class id
        best_class = cls;
        best_count = cnt;
      }
    if (best_class == dataset.labels[q]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(queries.size());
}

namespace {

int class_position(const std::vector<int>& class_ids, int label) {
  const auto it = std::lower_bound(class_ids.begin(), class_ids.end(), label);
  if (it == class_ids.end() || *it != label)
    throw std::invalid_argument("mtc: label " + std::to_string(label) + " unseen in training");
  return static_cast<int>(it - class_ids.begin());
}

Vec softmax(const Vec& logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  Vec p(logits.size());
  double s = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    s += p[i];
  }
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

double mtc_loss(const MtcModel& model, const std::vector<Vec>& points,
                const std::vector<int>& labels, const std::vector<const Matrix*>* bases,
                int* guard) {
  if (points.size() != labels.size()) throw std::invalid_argument("mtc_loss: labels mismatch");
  if (points.empty()) throw std::invalid_argument("mtc_loss: empty batch");
  double total = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    const Vec code = forward(model.net, points[i]).code;
    const Vec logits = model.class_weights.apply(code);
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double lse = 0.0;
    for (double v : logits) lse += std::exp(v - mx);
    lse = mx + std::log(lse);
    total += lse - logits[class_position(model.class_ids, labels[i])];

    if (model.beta != 0.0 && bases) {
      const Matrix* u = (*bases)[i];
      if (!u) {
        if (guard) ++*guard;
      } else {
        const Matrix je = input_jacobians(model.net, points[i]).j_encoder;
        const Matrix jw = model.class_weights * (je * *u);  // C x k
        total += model.beta * jw.frobenius_norm_sq();
      }
    }
  }
  return total / static_cast<double>(points.size());
}

MtcModel train_mtc(const AutoencoderNet& pretrained, const Dataset& labeled_dataset, double beta,
                   int k, const MtcConfig& config) {
  if (!labeled_dataset.has_labels()) throw std::invalid_argument("train_mtc: labels required");
  const std::vector<int> train_idx = labeled_dataset.effective_train();
  if (train_idx.empty()) throw std::invalid_argument("train_mtc: empty train split");

  MtcModel model;
  model.net = pretrained;  // theta^0 = theta*
  model.beta = beta;
  for (int i : train_idx) model.class_ids.push_back(labeled_dataset.labels[i]);
  std::sort(model.class_ids.begin(), model.class_ids.end());
  model.class_ids.erase(std::unique(model.class_ids.begin(), model.class_ids.end()),
                        model.class_ids.end());
  const int classes = static_cast<int>(model.class_ids.size());
  const int d = pretrained.code_dim();

  Rng rng(config.seed);
  {
    const double s = std::sqrt(6.0 / (d + classes));
    Matrix w(classes, d);
    for (int i = 0; i < classes; ++i)
      for (int j = 0; j < d; ++j) w(i, j) = rng.uniform(-s, s);
    model.class_weights = std::move(w);
  }

  // Tangent bases from the pre-trained autoencoder, fixed for the whole run.
  std::vector<Matrix> bases(train_idx.size());
  std::vector<bool> has_basis(train_idx.size(), false);
  if (beta != 0.0) {
    for (size_t i = 0; i < train_idx.size(); ++i) {
      try {
        bases[i] = tangent_basis(pretrained, labeled_dataset.points[train_idx[i]], k).as_matrix();
        has_basis[i] = true;
      } catch (const std::runtime_error&) {
        ++model.tangent_skip_count;
      }
    }
  }

  const size_t theta_dim = model.net.theta.size();
  const size_t w_dim = static_cast<size_t>(classes) * d;
  AdamState adam = AdamState::zeros(theta_dim + w_dim);

  const int steps_per_epoch =
      static_cast<int>((train_idx.size() + config.m - 1) / static_cast<size_t>(config.m));
  std::vector<double> epoch_means;
  Rng sample_rng = rng.derive(7);

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int step = 0; step < steps_per_epoch; ++step) {
      std::vector<int> pick(config.m);
      for (int i = 0; i < config.m; ++i)
        pick[i] = static_cast<int>(sample_rng.uniform_int(train_idx.size()));

      ad::Tape tape;
      TapeNet tn(tape, model.net);
      const ad::NodeId wnode = tape.param(model.class_weights);

      std::vector<ad::NodeId> terms;
      terms.reserve(pick.size());
      for (int pi : pick) {
        const int di = train_idx[pi];
        const Vec& x = labeled_dataset.points[di];
        const bool want_jac = beta != 0.0 && has_basis[pi];
        const auto e = tn.eval_encoder(x, want_jac);
        const ad::NodeId logits = tape.matmul(wnode, e.code);
        ad::NodeId term = tape.sub(tape.logsumexp(logits),
                                   tape.entry(logits, class_position(model.class_ids,
                                                                     labeled_dataset.labels[di])));
        if (want_jac) {
          const ad::NodeId u = tape.constant(bases[pi]);
          const ad::NodeId jw = tape.matmul(wnode, tape.matmul(e.j_encoder, u));
          term = tape.add(term, tape.scale(tape.frob_sq(jw), beta));
        }
        terms.push_back(term);
      }
      ad::NodeId loss = terms.front();
      for (size_t i = 1; i < terms.size(); ++i) loss = tape.add(loss, terms[i]);
      loss = tape.scale(loss, 1.0 / static_cast<double>(terms.size()));

      const double value = tape.scalar(loss);
      if (!std::isfinite(value)) throw std::runtime_error("train_mtc: non-finite loss");
      tape.backward(loss);

      Vec grad = tn.gather_gradient();
      const Matrix gw = tape.grad_or_zero(wnode);
      grad.reserve(theta_dim + w_dim);
      for (int i = 0; i < gw.rows(); ++i)
        for (int j = 0; j < gw.cols(); ++j) grad.push_back(gw(i, j));

      Vec params = model.net.theta;
      params.reserve(theta_dim + w_dim);
      for (int i = 0; i < classes; ++i)
        for (int j = 0; j < d; ++j) params.push_back(model.class_weights(i, j));

      adam_step(params, grad, adam, config.alpha, config.beta1, config.beta2);

      std::copy(params.begin(), params.begin() + theta_dim, model.net.theta.begin());
      size_t p = theta_dim;
      for (int i = 0; i < classes; ++i)
        for (int j = 0; j < d; ++j) model.class_weights(i, j) = params[p++];

      loss_sum += value;
    }
    epoch_means.push_back(loss_sum / steps_per_epoch);
    const int e = static_cast<int>(epoch_means.size());
    if (e > 5) {
      const double now = epoch_means[e - 1];
      const double then = epoch_means[e - 6];
      if (std::abs(now - then) / std::max(std::abs(then), 1e-12) < config.tol) break;
    }
  }
  return model;
}

Classification classify(const MtcModel& model, const Vec& x) {
  const Vec code = forward(model.net, x).code;
  const Vec logits = model.class_weights.apply(code);
  Classification c;
  c.probabilities = softmax(logits);
  int best = 0;
  for (size_t i = 1; i < c.probabilities.size(); ++i)
    if (c.probabilities[i] > c.probabilities[best]) best = static_cast<int>(i);
  c.class_id = model.class_ids[best];
  return c;
}

double mtc_accuracy(const MtcModel& model, const Dataset& dataset, const std::vector<int>& indices) {
  if (!dataset.has_labels()) throw std::invalid_argument("mtc_accuracy: labels required");
  if (indices.empty()) throw std::invalid_argument("mtc_accuracy: empty index set");
  int correct = 0;
  for (int i : indices)
    if (classify(model, dataset.points[i]).class_id == dataset.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace rcae
