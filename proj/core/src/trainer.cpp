#include "rcae/trainer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rcae/csv.hpp"
#include "rcae/svd.hpp"

namespace rcae {

void TrainConfig::validate(int dataset_size, int ambient_dim, int code_dim) const {
  if (m < 1) throw std::invalid_argument("config: m must be >= 1");
  if (m > dataset_size) throw std::invalid_argument("config: m exceeds dataset size");
  if (M < 0 || M > dataset_size) throw std::invalid_argument("config: M out of range");
  if (k < 0 || k > std::min(ambient_dim, code_dim))
    throw std::invalid_argument("config: k must satisfy 0 <= k <= min(n, d)");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    // beta = 0 is permitted for the RMS-descent reduction used in tests.
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw std::invalid_argument("config: beta1, beta2 must lie in [0, 1)");
  }
  if (sigma <= 0.0) throw std::invalid_argument("config: sigma must be positive");
  if (alpha < 0.0) throw std::invalid_argument("config: alpha must be non-negative");
  if (lambda < 0.0 || gamma < 0.0) throw std::invalid_argument("config: weights must be non-negative");
  if (T < 1) throw std::invalid_argument("config: T must be >= 1");
  if (inner_max_epochs < 1) throw std::invalid_argument("config: inner_max_epochs must be >= 1");
  if (inner_tol < 0.0) throw std::invalid_argument("config: inner_tol must be non-negative");
}

namespace {

constexpr int kConvergenceWindow = 5;

CurvatureKind parse_kind(const std::string& s) {
  if (s == "kappa0") return CurvatureKind::kKappa0;
  if (s == "kappa1") return CurvatureKind::kKappa1;
  if (s == "kappa2") return CurvatureKind::kKappa2;
  throw std::runtime_error("config: unknown curvature_mode '" + s + "'");
}

std::string kind_name(CurvatureKind k) {
  switch (k) {
    case CurvatureKind::kKappa0: return "kappa0";
    case CurvatureKind::kKappa1: return "kappa1";
    case CurvatureKind::kKappa2: return "kappa2";
  }
  return "kappa1";
}

}  // namespace

TrainConfig parse_train_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));

    try {
      if (key == "m") base.m = std::stoi(val);
      else if (key == "lambda") base.lambda = std::stod(val);
      else if (key == "gamma") base.gamma = std::stod(val);
      else if (key == "sigma") base.sigma = std::stod(val);
      else if (key == "alpha") base.alpha = std::stod(val);
      else if (key == "beta1") base.beta1 = std::stod(val);
      else if (key == "beta2") base.beta2 = std::stod(val);
      else if (key == "T") base.T = std::stoi(val);
      else if (key == "M") base.M = std::stoi(val);
      else if (key == "k") base.k = std::stoi(val);
      else if (key == "curvature_mode") base.curvature_mode = parse_kind(val);
      else if (key == "kappa_n2_normalization") base.kappa_n2_normalization = (val == "1" || val == "true");
      else if (key == "inner_max_epochs") base.inner_max_epochs = std::stoi(val);
      else if (key == "inner_tol") base.inner_tol = std::stod(val);
      else if (key == "seed") base.seed = std::stoull(val);
      else throw std::runtime_error("unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  return base;
}

void write_train_config(const TrainConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "m = " << c.m << "\n"
      << "lambda = " << format_double(c.lambda) << "\n"
      << "gamma = " << format_double(c.gamma) << "\n"
      << "sigma = " << format_double(c.sigma) << "\n"
      << "alpha = " << format_double(c.alpha) << "\n"
      << "beta1 = " << format_double(c.beta1) << "\n"
      << "beta2 = " << format_double(c.beta2) << "\n"
      << "T = " << c.T << "\n"
      << "M = " << c.M << "\n"
      << "k = " << c.k << "\n"
      << "curvature_mode = " << kind_name(c.curvature_mode) << "\n"
      << "kappa_n2_normalization = " << (c.kappa_n2_normalization ? 1 : 0) << "\n"
      << "inner_max_epochs = " << c.inner_max_epochs << "\n"
      << "inner_tol = " << format_double(c.inner_tol) << "\n"
      << "seed = " << c.seed << "\n";
}

namespace {

enum class Method { kAlternating, kCaeH };

// Per-step loss of Algorithm 1 (or the CAE+H variant) on a fresh tape.
struct StepSample {
  std::vector<Vec> batch;
  std::vector<Vec> noise;
  std::vector<int> anchor_picks;  // positions within the anchor list
};

StepSample draw_step_sample(const Dataset& dataset, const std::vector<int>& train_idx,
                            const RankTargets& targets, const TrainConfig& cfg, Rng& rng) {
  StepSample s;
  const int n = dataset.dim();
  s.batch.reserve(cfg.m);
  // The three sampling lines, in fixed order, drawn unconditionally so that
  // ablations (lambda = 0, gamma = 0) follow the same stream.
  for (int i = 0; i < cfg.m; ++i)
    s.batch.push_back(dataset.points[train_idx[rng.uniform_int(train_idx.size())]]);
  s.noise.reserve(cfg.m);
  for (int i = 0; i < cfg.m; ++i) s.noise.push_back(rng.normal_vec(n, cfg.sigma));
  s.anchor_picks.reserve(cfg.m);
  if (targets.count() > 0)
    for (int i = 0; i < cfg.m; ++i)
      s.anchor_picks.push_back(static_cast<int>(rng.uniform_int(targets.count())));
  return s;
}

struct StepOutcome {
  double loss = 0.0;
  int guard_skips = 0;
};

StepOutcome run_step(AutoencoderNet& net, const Dataset& dataset, const RankTargets& targets,
                     const TrainConfig& cfg, AdamState& adam, const StepSample& s, Method method) {
  StepOutcome out;
  const LossEval le = loss_gradient(net, [&](ad::Tape& tape, TapeNet& tn) {
    ad::NodeId loss = build_reconstruction(tape, tn, s.batch);
    if (method == Method::kAlternating) {
      if (cfg.gamma != 0.0) {
        const ad::NodeId kap =
            build_kappa(tape, tn, s.batch, cfg.curvature(), s.noise, &out.guard_skips);
        loss = tape.add(loss, tape.scale(kap, cfg.gamma));
      }
      if (cfg.lambda != 0.0 && targets.count() > 0) {
        std::vector<Vec> pts;
        std::vector<const Matrix*> mats;
        pts.reserve(s.anchor_picks.size());
        for (int pos : s.anchor_picks) {
          pts.push_back(dataset.points[targets.anchor_indices[pos]]);
          mats.push_back(&targets.matrices[pos]);
        }
        loss = tape.add(loss, tape.scale(build_rank_penalty(tape, tn, pts, mats), cfg.lambda));
      }
    } else {
      if (cfg.gamma != 0.0) {
        // Contractive norm + stochastic-difference robustness, encoder only.
        std::vector<ad::NodeId> terms;
        terms.reserve(s.batch.size());
        for (size_t i = 0; i < s.batch.size(); ++i) {
          const auto e0 = tn.eval_encoder(s.batch[i], true);
          const auto e1 = tn.eval_encoder(vec_add(s.batch[i], s.noise[i]), true);
          const ad::NodeId contractive = tape.frob_sq(e0.j_encoder);
          const ad::NodeId robustness = tape.frob_sq(tape.sub(e1.j_encoder, e0.j_encoder));
          terms.push_back(tape.add(contractive, robustness));
        }
        ad::NodeId acc = terms.front();
        for (size_t i = 1; i < terms.size(); ++i) acc = tape.add(acc, terms[i]);
        loss = tape.add(loss, tape.scale(acc, cfg.gamma / static_cast<double>(terms.size())));
      }
    }
    return loss;
  });
  adam_step(net.theta, le.gradient, adam, cfg.alpha, cfg.beta1, cfg.beta2);
  out.loss = le.value;
  return out;
}

InnerResult inner_minimize_impl(AutoencoderNet& net, const Dataset& dataset,
                                const RankTargets& targets, const TrainConfig& cfg,
                                AdamState& adam, Rng& rng, Method method) {
  InnerResult res;
  const std::vector<int> train_idx = dataset.effective_train();
  if (train_idx.empty()) throw std::invalid_argument("inner_minimize: empty train split");
  const int steps_per_epoch =
      static_cast<int>((train_idx.size() + cfg.m - 1) / static_cast<size_t>(cfg.m));

  for (int epoch = 0; epoch < cfg.inner_max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int step = 0; step < steps_per_epoch; ++step) {
      const StepSample s = draw_step_sample(dataset, train_idx, targets, cfg, rng);
      StepOutcome so;
      try {
        so = run_step(net, dataset, targets, cfg, adam, s, method);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("inner_minimize: " + std::string(e.what()) + " (epoch " +
                                 std::to_string(epoch + 1) + ", step " + std::to_string(step + 1) +
                                 ", adam step " + std::to_string(adam.step_count) + ")");
      }
      loss_sum += so.loss;
      res.kappa2_guard_count += so.guard_skips;
      ++res.steps;
    }
    res.epoch_mean_loss.push_back(loss_sum / steps_per_epoch);
    res.epochs_used = epoch + 1;

    const int e = static_cast<int>(res.epoch_mean_loss.size());
    if (e > kConvergenceWindow) {
      const double now = res.epoch_mean_loss[e - 1];
      const double then = res.epoch_mean_loss[e - 1 - kConvergenceWindow];
      const double rel = std::abs(now - then) / std::max(std::abs(then), 1e-12);
      if (rel < cfg.inner_tol) break;
    }
  }
  return res;
}

// One pass over the anchors: Jacobian, its SVD, spectrum, and the rank-k
// truncation. Fans out to a small worker pool; each anchor writes its own
// slot, so results do not depend on the worker count.
struct AnchorPass {
  RankTargets targets;
  std::vector<Vec> spectra;
  std::vector<Matrix> jacobians;
};

AnchorPass anchor_pass(const AutoencoderNet& net, const Dataset& dataset,
                       const std::vector<int>& anchors, int k) {
  AnchorPass out;
  out.targets.anchor_indices = anchors;
  std::sort(out.targets.anchor_indices.begin(), out.targets.anchor_indices.end());
  const int count = static_cast<int>(anchors.size());
  out.targets.matrices.assign(count, Matrix());
  out.spectra.assign(count, Vec());
  out.jacobians.assign(count, Matrix());

  const int n = net.ambient_dim();
  const int d = net.code_dim();
  auto work = [&](int j) {
    const int idx = out.targets.anchor_indices[j];
    try {
      const JacobianPair jp = input_jacobians(net, dataset.points[idx]);
      SvdFactors f;
      if (d < n) {
        f = svd_of_product(jp.j_decoder, jp.j_encoder);
      } else {
        f = svd(jp.j_decoder * jp.j_encoder);
      }
      out.jacobians[j] = f.reconstruct();  // consistent with the factors used for B
      out.spectra[j] = f.singular_values;
      out.targets.matrices[j] = f.truncated(k);
    } catch (const std::exception& e) {
      throw std::runtime_error("anchor " + std::to_string(idx) + ": " + e.what());
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min<int>(count, std::max(1u, std::min(hw, 8u)));
  if (workers <= 1 || count < 16) {
    for (int j = 0; j < count; ++j) work(j);
  } else {
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      futs.push_back(std::async(std::launch::async, [&, w]() {
        for (int j = w; j < count; j += workers) work(j);
      }));
    }
    for (auto& f : futs) f.get();
  }
  return out;
}

}  // namespace

RankTargets update_rank_targets(const AutoencoderNet& net, const Dataset& dataset,
                                const std::vector<int>& anchors, int k) {
  return anchor_pass(net, dataset, anchors, k).targets;
}

InnerResult inner_minimize(AutoencoderNet& net, const Dataset& dataset, const RankTargets& targets,
                           const TrainConfig& config, AdamState& adam, Rng& rng) {
  return inner_minimize_impl(net, dataset, targets, config, adam, rng, Method::kAlternating);
}

namespace {

// Round evaluation shared by both training methods: reconstruction and
// curvature terms over the train split, with one fresh noise draw per point.
struct RoundEval {
  double recon = 0.0;
  double kappa = 0.0;
};

RoundEval evaluate_round_terms(const AutoencoderNet& net, const Dataset& dataset,
                               const TrainConfig& cfg, Rng& eval_rng, Method method) {
  RoundEval ev;
  const std::vector<int> train_idx = dataset.effective_train();
  std::vector<Vec> batch;
  batch.reserve(train_idx.size());
  for (int i : train_idx) batch.push_back(dataset.points[i]);
  ev.recon = reconstruction_loss(net, batch);
  if (cfg.gamma != 0.0) {
    std::vector<Vec> noise;
    noise.reserve(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) noise.push_back(eval_rng.normal_vec(dataset.dim(), cfg.sigma));
    if (method == Method::kAlternating) {
      ev.kappa = kappa_term(net, batch, cfg.curvature(), noise).value;
    } else {
      double s = 0.0;
      for (size_t i = 0; i < batch.size(); ++i) {
        const Matrix j0 = input_jacobians(net, batch[i]).j_encoder;
        const Matrix j1 = input_jacobians(net, vec_add(batch[i], noise[i])).j_encoder;
        s += j0.frobenius_norm_sq() + (j1 - j0).frobenius_norm_sq();
      }
      ev.kappa = s / static_cast<double>(batch.size());
    }
  }
  return ev;
}

TrainResult train_impl(const Dataset& dataset, const AutoencoderNet& net_init,
                       const TrainConfig& cfg, Method method, TrainState* resume) {
  net_init.validate();
  cfg.validate(static_cast<int>(dataset.effective_train().size()), net_init.ambient_dim(),
               net_init.code_dim());

  const Rng master(cfg.seed);
  TrainState st;
  if (resume) {
    st = std::move(*resume);
  } else {
    st.net = net_init;
    st.adam = AdamState::zeros(net_init.theta.size());
    const std::vector<int> train_idx = dataset.effective_train();
    Rng anchor_rng = master.derive(1);
    const std::vector<int> picks =
        anchor_rng.sample_without_replacement(static_cast<int>(train_idx.size()), cfg.M);
    std::vector<int> anchors;
    anchors.reserve(picks.size());
    for (int p : picks) anchors.push_back(train_idx[p]);
    st.targets = RankTargets::zeros(anchors, dataset.dim());
    st.report.anchor_indices = st.targets.anchor_indices;
  }

  for (int t = st.rounds_done + 1; t <= cfg.T; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    RoundRecord rec;
    rec.round = t;

    Rng inner_rng = master.derive(1000 + static_cast<uint64_t>(t));
    const InnerResult ir =
        inner_minimize_impl(st.net, dataset, st.targets, cfg, st.adam, inner_rng, method);
    rec.epochs_used = ir.epochs_used;
    rec.epoch_mean_loss = ir.epoch_mean_loss;
    rec.kappa2_guard_count = ir.kappa2_guard_count;
    st.report.total_steps += ir.steps;
    st.report.kappa2_guard_total += ir.kappa2_guard_count;

    Rng eval_rng = master.derive(2000000 + static_cast<uint64_t>(t));
    const RoundEval ev = evaluate_round_terms(st.net, dataset, cfg, eval_rng, method);
    rec.recon_term = ev.recon;
    rec.kappa_term_value = ev.kappa;

    if (method == Method::kAlternating) {
      const AnchorPass ap = anchor_pass(st.net, dataset, st.targets.anchor_indices, cfg.k);
      double rank_before = 0.0, rank_after = 0.0;
      for (int j = 0; j < ap.targets.count(); ++j) {
        rank_before += (ap.jacobians[j] - st.targets.matrices[j]).frobenius_norm_sq();
        rank_after += (ap.jacobians[j] - ap.targets.matrices[j]).frobenius_norm_sq();
      }
      const double denom = std::max(1, ap.targets.count());
      rec.rank_term_before = rank_before / denom;
      rec.rank_term_after = rank_after / denom;
      rec.anchor_spectra = ap.spectra;
      st.targets = ap.targets;
    } else if (cfg.M > 0) {
      const AnchorPass ap = anchor_pass(st.net, dataset, st.targets.anchor_indices, cfg.k);
      rec.anchor_spectra = ap.spectra;
    }
    rec.f_before_bstep = ev.recon + cfg.gamma * ev.kappa + cfg.lambda * rec.rank_term_before;
    rec.f_after_bstep = ev.recon + cfg.gamma * ev.kappa + cfg.lambda * rec.rank_term_after;

    rec.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    st.report.rounds.push_back(std::move(rec));
    st.rounds_done = t;
  }

  TrainResult out;
  out.net = std::move(st.net);
  out.report = std::move(st.report);
  out.adam = std::move(st.adam);
  out.targets = std::move(st.targets);
  out.rounds_done = st.rounds_done;
  return out;
}

}  // namespace

TrainState TrainResult::to_state() const {
  TrainState s;
  s.net = net;
  s.adam = adam;
  s.targets = targets;
  s.rounds_done = rounds_done;
  s.report = report;
  return s;
}

TrainResult train(const Dataset& dataset, const AutoencoderNet& net_init, const TrainConfig& config) {
  return train_impl(dataset, net_init, config, Method::kAlternating, nullptr);
}

TrainResult train_cae_h_baseline(const Dataset& dataset, const AutoencoderNet& net_init,
                                 const TrainConfig& config) {
  return train_impl(dataset, net_init, config, Method::kCaeH, nullptr);
}

TrainResult train_resume(const Dataset& dataset, TrainState state, const TrainConfig& config) {
  return train_impl(dataset, state.net, config, Method::kAlternating, &state);
}

double TrainReport::final_residual_ratio(int k) const {
  if (rounds.empty() || rounds.back().anchor_spectra.empty()) return 0.0;
  const auto& spectra = rounds.back().anchor_spectra;
  double s = 0.0;
  int used = 0;
  for (const Vec& sv : spectra) {
    if (static_cast<int>(sv.size()) <= k) continue;
    const double s1 = sv[0];
    s += s1 > 0.0 ? sv[k] / s1 : 0.0;
    ++used;
  }
  return used ? s / used : 0.0;
}

namespace {

nlohmann::json round_to_json(const RoundRecord& r, bool with_timing) {
  nlohmann::json j{{"round", r.round},
                   {"epochs_used", r.epochs_used},
                   {"epoch_mean_loss", r.epoch_mean_loss},
                   {"f_before_bstep", r.f_before_bstep},
                   {"f_after_bstep", r.f_after_bstep},
                   {"recon_term", r.recon_term},
                   {"kappa_term", r.kappa_term_value},
                   {"rank_term_before", r.rank_term_before},
                   {"rank_term_after", r.rank_term_after},
                   {"anchor_spectra", r.anchor_spectra},
                   {"kappa2_guard_count", r.kappa2_guard_count}};
  if (with_timing) j["wall_clock_sec"] = r.wall_clock_sec;
  return j;
}

RoundRecord round_from_json(const nlohmann::json& j) {
  RoundRecord r;
  r.round = j.at("round").get<int>();
  r.epochs_used = j.at("epochs_used").get<int>();
  r.epoch_mean_loss = j.at("epoch_mean_loss").get<std::vector<double>>();
  r.f_before_bstep = j.at("f_before_bstep").get<double>();
  r.f_after_bstep = j.at("f_after_bstep").get<double>();
  r.recon_term = j.at("recon_term").get<double>();
  r.kappa_term_value = j.at("kappa_term").get<double>();
  r.rank_term_before = j.at("rank_term_before").get<double>();
  r.rank_term_after = j.at("rank_term_after").get<double>();
  r.anchor_spectra = j.at("anchor_spectra").get<std::vector<Vec>>();
  r.kappa2_guard_count = j.at("kappa2_guard_count").get<long>();
  r.wall_clock_sec = j.value("wall_clock_sec", 0.0);
  return r;
}

nlohmann::json report_to_json(const TrainReport& rep, bool with_timing) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : rep.rounds) rounds.push_back(round_to_json(r, with_timing));
  return nlohmann::json{{"anchor_indices", rep.anchor_indices},
                        {"total_steps", rep.total_steps},
                        {"kappa2_guard_total", rep.kappa2_guard_total},
                        {"rounds", std::move(rounds)}};
}

}  // namespace

std::string TrainReport::deterministic_json() const { return report_to_json(*this, false).dump(); }

void TrainReport::write_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << report_to_json(*this, true).dump(1) << "\n";
}

void TrainReport::write_csv_traces(const std::string& directory) const {
  {
    std::ofstream out(directory + "/rounds.csv");
    if (!out) throw std::runtime_error("cannot open for writing: " + directory + "/rounds.csv");
    out << "round,epochs_used,f_before_bstep,f_after_bstep,recon,kappa,rank_before,rank_after,"
           "kappa2_guard_count,wall_clock_sec\n";
    for (const auto& r : rounds)
      out << r.round << ',' << r.epochs_used << ',' << format_double(r.f_before_bstep) << ','
          << format_double(r.f_after_bstep) << ',' << format_double(r.recon_term) << ','
          << format_double(r.kappa_term_value) << ',' << format_double(r.rank_term_before) << ','
          << format_double(r.rank_term_after) << ',' << r.kappa2_guard_count << ','
          << format_double(r.wall_clock_sec) << '\n';
  }
  {
    std::ofstream out(directory + "/epochs.csv");
    if (!out) throw std::runtime_error("cannot open for writing: " + directory + "/epochs.csv");
    out << "round,epoch,mean_loss\n";
    for (const auto& r : rounds)
      for (size_t e = 0; e < r.epoch_mean_loss.size(); ++e)
        out << r.round << ',' << (e + 1) << ',' << format_double(r.epoch_mean_loss[e]) << '\n';
  }
  {
    std::ofstream out(directory + "/spectra.csv");
    if (!out) throw std::runtime_error("cannot open for writing: " + directory + "/spectra.csv");
    out << "round,anchor,singular_index,value\n";
    for (const auto& r : rounds)
      for (size_t a = 0; a < r.anchor_spectra.size(); ++a)
        for (size_t s = 0; s < r.anchor_spectra[a].size(); ++s)
          out << r.round << ',' << a << ',' << s << ',' << format_double(r.anchor_spectra[a][s])
              << '\n';
  }
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.raw()}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  return Matrix(j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("data").get<Vec>());
}

nlohmann::json config_to_json(const TrainConfig& c) {
  return nlohmann::json{{"m", c.m},
                        {"lambda", c.lambda},
                        {"gamma", c.gamma},
                        {"sigma", c.sigma},
                        {"alpha", c.alpha},
                        {"beta1", c.beta1},
                        {"beta2", c.beta2},
                        {"T", c.T},
                        {"M", c.M},
                        {"k", c.k},
                        {"curvature_mode", kind_name(c.curvature_mode)},
                        {"kappa_n2_normalization", c.kappa_n2_normalization},
                        {"inner_max_epochs", c.inner_max_epochs},
                        {"inner_tol", c.inner_tol},
                        {"seed", c.seed}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.m = j.at("m").get<int>();
  c.lambda = j.at("lambda").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.sigma = j.at("sigma").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.T = j.at("T").get<int>();
  c.M = j.at("M").get<int>();
  c.k = j.at("k").get<int>();
  c.curvature_mode = parse_kind(j.at("curvature_mode").get<std::string>());
  c.kappa_n2_normalization = j.at("kappa_n2_normalization").get<bool>();
  c.inner_max_epochs = j.at("inner_max_epochs").get<int>();
  c.inner_tol = j.at("inner_tol").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

nlohmann::json net_to_json(const AutoencoderNet& net) {
  auto layers = [](const std::vector<LayerSpec>& ls) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& l : ls)
      arr.push_back({{"in", l.in_dim},
                     {"out", l.out_dim},
                     {"activation", l.activation == Activation::kTanh ? "tanh" : "identity"}});
    return arr;
  };
  return nlohmann::json{
      {"encoder", layers(net.encoder_layers)}, {"decoder", layers(net.decoder_layers)}, {"theta", net.theta}};
}

AutoencoderNet net_from_json(const nlohmann::json& j) {
  auto layers = [](const nlohmann::json& arr) {
    std::vector<LayerSpec> ls;
    for (const auto& l : arr)
      ls.push_back({l.at("in").get<int>(), l.at("out").get<int>(),
                    l.at("activation").get<std::string>() == "tanh" ? Activation::kTanh
                                                                    : Activation::kIdentity});
    return ls;
  };
  AutoencoderNet net;
  net.encoder_layers = layers(j.at("encoder"));
  net.decoder_layers = layers(j.at("decoder"));
  net.theta = j.at("theta").get<Vec>();
  net.validate();
  return net;
}

}  // namespace

void save_train_state(const TrainState& s, const TrainConfig& c, const std::string& path) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& m : s.targets.matrices) targets.push_back(matrix_to_json(m));
  nlohmann::json j{{"format", "rcae-train-state-v1"},
                   {"config", config_to_json(c)},
                   {"net", net_to_json(s.net)},
                   {"adam",
                    {{"first_moment", s.adam.first_moment},
                     {"second_moment", s.adam.second_moment},
                     {"step_count", s.adam.step_count}}},
                   {"anchor_indices", s.targets.anchor_indices},
                   {"target_matrices", std::move(targets)},
                   {"rounds_done", s.rounds_done},
                   {"report", report_to_json(s.report, true)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(1) << "\n";
}

TrainState load_train_state(const std::string& path, TrainConfig* config_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "rcae-train-state-v1")
    throw std::runtime_error("train state: unknown format in " + path);
  TrainState s;
  s.net = net_from_json(j.at("net"));
  s.adam.first_moment = j.at("adam").at("first_moment").get<Vec>();
  s.adam.second_moment = j.at("adam").at("second_moment").get<Vec>();
  s.adam.step_count = j.at("adam").at("step_count").get<long>();
  s.targets.anchor_indices = j.at("anchor_indices").get<std::vector<int>>();
  for (const auto& mj : j.at("target_matrices")) s.targets.matrices.push_back(matrix_from_json(mj));
  s.rounds_done = j.at("rounds_done").get<int>();
  const auto& rj = j.at("report");
  s.report.anchor_indices = rj.at("anchor_indices").get<std::vector<int>>();
  s.report.total_steps = rj.at("total_steps").get<long>();
  s.report.kappa2_guard_total = rj.at("kappa2_guard_total").get<long>();
  for (const auto& rr : rj.at("rounds")) s.report.rounds.push_back(round_from_json(rr));
  if (config_out) *config_out = config_from_json(j.at("config"));
  return s;
}

}  // namespace rcae
