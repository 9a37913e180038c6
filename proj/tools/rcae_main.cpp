// rcae: command-line driver for dataset synthesis, autoencoder training with
// the soft-rank alternating algorithm, evaluation metrics, and the numerical
// verification suite.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcae/csv.hpp"
#include "rcae/data.hpp"
#include "rcae/eval.hpp"
#include "rcae/geometry.hpp"
#include "rcae/net.hpp"
#include "rcae/svd.hpp"
#include "rcae/trainer.hpp"
#include "rcae/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "rcae 0.1.0";

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", std::gmtime(&t));
  return buf;
}

fs::path resolve_out_dir(const std::string& out_flag, uint64_t seed) {
  if (!out_flag.empty()) return fs::path(out_flag);
  const char* base = std::getenv("RCAE_OUT_DIR");
  fs::path dir = base ? fs::path(base) : fs::path("runs");
  return dir / (timestamp_utc() + "-seed" + std::to_string(seed));
}

struct Manifest {
  json config;
  uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::string started;
  std::string finished;

  void add(const fs::path& p) { artifacts.push_back(p.string()); }
  void write(const fs::path& dir) const {
    json j{{"tool", kVersion}, {"seed", seed},     {"config", config},
           {"artifacts", artifacts}, {"started", started}, {"finished", finished}};
    std::ofstream out(dir / "manifest.json");
    out << j.dump(1) << "\n";
  }
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stoi(item));
  return v;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

rcae::Dataset load_dataset(const std::string& path, int label_col, bool skip_header) {
  rcae::CsvSchema schema;
  schema.skip_header = skip_header;
  if (label_col >= 0) {
    schema.label_column = label_col;
  } else if (label_col == -1) {
    // last column
    const rcae::Matrix probe = rcae::read_matrix_csv(path, skip_header);
    schema.label_column = probe.cols() - 1;
  }
  return rcae::load_csv(path, schema);
}

// ---- synth ----

int cmd_synth_stiefel(int n1, int n2, int count, double delta, uint64_t seed,
                      const std::string& out_flag) {
  rcae::StiefelSpec spec{n1, n2, count, delta, seed};
  spec.validate();
  const fs::path dir = resolve_out_dir(out_flag, seed);
  fs::create_directories(dir);

  Manifest man;
  man.started = timestamp_utc();
  man.seed = seed;
  man.config = json{{"kind", "stiefel"}, {"n1", n1}, {"n2", n2},
                    {"n", count},        {"delta", delta}, {"seed", seed}};

  const rcae::StiefelSample sample = rcae::sample_stiefel(spec);
  rcae::save_dataset_csv(sample.noisy, (dir / "data.csv").string());
  rcae::save_dataset_csv(sample.clean, (dir / "data_clean.csv").string());
  {
    std::ofstream meta(dir / "meta.json");
    meta << man.config.dump(1) << "\n";
  }
  man.add(dir / "data.csv");
  man.add(dir / "data_clean.csv");
  man.add(dir / "meta.json");
  man.finished = timestamp_utc();
  man.write(dir);
  std::cout << "wrote " << count << " points of dim " << spec.ambient_dim() << " to " << dir
            << "\n";
  return 0;
}

int cmd_synth_toy(int count, uint64_t seed, const std::string& out_flag) {
  const fs::path dir = resolve_out_dir(out_flag, seed);
  fs::create_directories(dir);
  Manifest man;
  man.started = timestamp_utc();
  man.seed = seed;
  man.config = json{{"kind", "toy"}, {"n", count}, {"seed", seed}};
  const rcae::Dataset ds = rcae::toy_halfplane(count, seed);
  rcae::save_dataset_csv(ds, (dir / "data.csv").string());
  {
    std::ofstream meta(dir / "meta.json");
    meta << man.config.dump(1) << "\n";
  }
  man.add(dir / "data.csv");
  man.add(dir / "meta.json");
  man.finished = timestamp_utc();
  man.write(dir);
  std::cout << "wrote " << count << " toy points to " << dir << "\n";
  return 0;
}

// ---- train ----

struct TrainCli {
  std::string data_path;
  int label_col = -2;  // -2 none, -1 last
  bool skip_header = false;
  std::string method = "as";
  std::string config_path;
  std::string resume_path;
  std::string out_flag;
  std::string hidden = "";
  int code_dim = 0;
  int kappa = -1;
  double train_fraction = 1.0;
  std::string grid;
  bool rounds_given = false;
  rcae::TrainConfig cfg;
};

rcae::AutoencoderNet build_net_for(const rcae::Dataset& ds, const TrainCli& tc) {
  const int n = ds.dim();
  std::vector<int> hidden =
      tc.hidden.empty() ? std::vector<int>{4 * n} : parse_int_list(tc.hidden);
  const int d = tc.code_dim > 0 ? tc.code_dim : n;
  return rcae::make_autoencoder_mirrored(n, hidden, d, rcae::Rng(tc.cfg.seed).derive(42).seed());
}

int run_single_training(const TrainCli& tc, const rcae::Dataset& ds, const fs::path& dir,
                        Manifest& man) {
  rcae::TrainConfig cfg = tc.cfg;

  rcae::TrainResult result;
  if (!tc.resume_path.empty()) {
    rcae::TrainConfig saved;
    rcae::TrainState state = rcae::load_train_state(tc.resume_path, &saved);
    if (tc.rounds_given) saved.T = cfg.T;  // extend the round budget on request
    result = rcae::train_resume(ds, std::move(state), saved);
    cfg = saved;
  } else {
    const rcae::AutoencoderNet net0 = build_net_for(ds, tc);
    result = tc.method == "caeh" ? rcae::train_cae_h_baseline(ds, net0, cfg)
                                 : rcae::train(ds, net0, cfg);
  }

  rcae::save_checkpoint(result.net, (dir / "checkpoint.json").string());
  result.report.write_json((dir / "report.json").string());
  result.report.write_csv_traces(dir.string());
  rcae::write_train_config(cfg, (dir / "config.txt").string());
  rcae::save_train_state(result.to_state(), cfg, (dir / "state.json").string());
  for (const char* f : {"checkpoint.json", "report.json", "rounds.csv", "epochs.csv",
                        "spectra.csv", "config.txt", "state.json"})
    man.add(dir / f);

  const double ratio = result.report.final_residual_ratio(cfg.k);
  std::cout << "rounds " << result.report.rounds.size() << ", final recon "
            << (result.report.rounds.empty() ? 0.0 : result.report.rounds.back().recon_term)
            << ", mean sigma_{k+1}/sigma_1 at anchors " << ratio << "\n";
  return 0;
}

int cmd_train(const TrainCli& tc) {
  rcae::Dataset ds = load_dataset(tc.data_path, tc.label_col == -2 ? -3 : tc.label_col,
                                  tc.skip_header);
  if (tc.train_fraction < 1.0)
    ds = rcae::make_split(ds, {tc.train_fraction, 0.0, 1.0 - tc.train_fraction}, tc.cfg.seed);

  const fs::path dir = resolve_out_dir(tc.out_flag, tc.cfg.seed);
  fs::create_directories(dir);
  Manifest man;
  man.started = timestamp_utc();
  man.seed = tc.cfg.seed;
  {
    std::stringstream cfgjson;
    man.config = json{{"method", tc.method},
                      {"data", tc.data_path},
                      {"hidden", tc.hidden},
                      {"code_dim", tc.code_dim},
                      {"T", tc.cfg.T},
                      {"lambda", tc.cfg.lambda},
                      {"gamma", tc.cfg.gamma},
                      {"k", tc.cfg.k},
                      {"seed", tc.cfg.seed}};
  }

  int rc = 0;
  if (!tc.grid.empty()) {
    // "lambda=1,4,16;gamma=0,0.5" -> cross-product sweep, one line per cell.
    std::vector<double> lambdas{tc.cfg.lambda}, gammas{tc.cfg.gamma};
    std::stringstream ss(tc.grid);
    std::string part;
    while (std::getline(ss, part, ';')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--grid expects key=v1,v2;key=...");
      const std::string key = part.substr(0, eq);
      const auto vals = parse_double_list(part.substr(eq + 1));
      if (key == "lambda") lambdas = vals;
      else if (key == "gamma") gammas = vals;
      else throw CLI::ValidationError("--grid keys are lambda and gamma");
    }
    std::ofstream gridcsv(dir / "grid.csv");
    gridcsv << "lambda,gamma,final_recon,residual_ratio,knn1_accuracy\n";
    for (double lam : lambdas)
      for (double gam : gammas) {
        TrainCli cell = tc;
        cell.cfg.lambda = lam;
        cell.cfg.gamma = gam;
        const rcae::AutoencoderNet net0 = build_net_for(ds, cell);
        const rcae::TrainResult res = cell.method == "caeh"
                                          ? rcae::train_cae_h_baseline(ds, net0, cell.cfg)
                                          : rcae::train(ds, net0, cell.cfg);
        double knn1 = -1.0;
        if (ds.has_labels()) knn1 = rcae::knn_on_codes(rcae::net_encoder_fn(res.net), ds, 1);
        gridcsv << rcae::format_double(lam) << ',' << rcae::format_double(gam) << ','
                << rcae::format_double(res.report.rounds.back().recon_term) << ','
                << rcae::format_double(res.report.final_residual_ratio(cell.cfg.k)) << ','
                << rcae::format_double(knn1) << '\n';
      }
    man.add(dir / "grid.csv");
  } else {
    rc = run_single_training(tc, ds, dir, man);
  }
  man.finished = timestamp_utc();
  man.write(dir);
  std::cout << "artifacts in " << dir << "\n";
  return rc;
}

// ---- eval ----

int cmd_eval(const std::string& checkpoint, const std::string& data_path, int label_col,
             bool skip_header, const std::string& mode, const std::string& spec_path,
             int eval_samples, int kmax, const std::string& beta_grid, int tangent_k,
             double train_fraction, uint64_t seed, const std::string& out_flag) {
  const rcae::AutoencoderNet net = rcae::load_checkpoint(checkpoint);
  const fs::path dir = resolve_out_dir(out_flag, seed);
  fs::create_directories(dir);
  Manifest man;
  man.started = timestamp_utc();
  man.seed = seed;
  man.config = json{{"mode", mode}, {"checkpoint", checkpoint}, {"data", data_path}, {"seed", seed}};

  if (mode == "stiefel") {
    if (spec_path.empty()) throw CLI::ValidationError("--spec meta.json required for stiefel metrics");
    std::ifstream in(spec_path);
    if (!in) throw CLI::ValidationError("cannot open " + spec_path);
    json meta;
    in >> meta;
    rcae::StiefelSpec spec{meta.at("n1").get<int>(), meta.at("n2").get<int>(), 1,
                           meta.at("delta").get<double>(), seed};
    spec.count = 1;
    const rcae::StiefelMetrics m =
        rcae::stiefel_metrics(rcae::net_autoencoder_fn(net), spec, eval_samples, seed);
    std::ofstream out(dir / "metrics.csv");
    out << "metric,value,stderr\n";
    out << "e1," << rcae::format_double(m.e1) << ',' << rcae::format_double(m.se_e1) << '\n';
    out << "e2," << rcae::format_double(m.e2) << ',' << rcae::format_double(m.se_e2) << '\n';
    out << "one_i," << rcae::format_double(m.one_i) << ",\n";
    out << "zero_i," << rcae::format_double(m.zero_i) << ",\n";
    man.add(dir / "metrics.csv");
    std::cout << "e1 " << m.e1 << ", e2 " << m.e2 << ", 1_I " << m.one_i << ", 0_I " << m.zero_i
              << "\n";
  } else if (mode == "knn") {
    rcae::Dataset ds = load_dataset(data_path, label_col, skip_header);
    if (!ds.has_labels()) throw CLI::ValidationError("knn mode requires a labeled dataset");
    if (ds.test_indices.empty())
      ds = rcae::make_split(ds, {train_fraction, 0.0, 1.0 - train_fraction}, seed);
    std::ofstream out(dir / "knn.csv");
    out << "K,codes_accuracy,raw_accuracy\n";
    for (int k = 1; k <= kmax; ++k) {
      const double acc = rcae::knn_on_codes(rcae::net_encoder_fn(net), ds, k);
      const double raw = rcae::knn_on_codes(rcae::identity_fn(), ds, k);
      out << k << ',' << rcae::format_double(acc) << ',' << rcae::format_double(raw) << '\n';
    }
    man.add(dir / "knn.csv");
    std::cout << "wrote K = 1.." << kmax << " sweep\n";
  } else if (mode == "mtc") {
    rcae::Dataset ds = load_dataset(data_path, label_col, skip_header);
    if (!ds.has_labels()) throw CLI::ValidationError("mtc mode requires a labeled dataset");
    if (ds.test_indices.empty())
      ds = rcae::make_split(ds, {train_fraction, 0.0, 1.0 - train_fraction}, seed);
    const std::vector<double> betas = parse_double_list(beta_grid);
    std::ofstream out(dir / "mtc.csv");
    out << "beta,train_accuracy,test_accuracy,tangent_skips\n";
    for (double beta : betas) {
      rcae::MtcConfig mc;
      mc.seed = seed;
      const rcae::MtcModel model = rcae::train_mtc(net, ds, beta, tangent_k, mc);
      const double tr = rcae::mtc_accuracy(model, ds, ds.effective_train());
      const double te =
          ds.test_indices.empty() ? -1.0 : rcae::mtc_accuracy(model, ds, ds.test_indices);
      out << rcae::format_double(beta) << ',' << rcae::format_double(tr) << ','
          << rcae::format_double(te) << ',' << model.tangent_skip_count << '\n';
      std::cout << "beta " << beta << ": train " << tr << ", test " << te << "\n";
    }
    man.add(dir / "mtc.csv");
  } else {
    throw CLI::ValidationError("unknown --metrics mode: " + mode);
  }
  man.finished = timestamp_utc();
  man.write(dir);
  return 0;
}

// ---- verify ----

int report_and_exit(const std::vector<rcae::verify::CheckResult>& results) {
  rcae::verify::print_results(results);
  return rcae::verify::all_pass(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) +
               " -- autoencoder training with soft Jacobian-rank constraints"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic datasets");
  synth->require_subcommand(1);
  {
    auto* st = synth->add_subcommand("stiefel", "noisy samples of the Stiefel manifold St(n1, n2)");
    static int n1 = 4, n2 = 2, count = 2000;
    static double delta = 0.05;
    static uint64_t seed = 7;
    static std::string out;
    st->add_option("--n1", n1, "rows of the frame")->required();
    st->add_option("--n2", n2, "columns of the frame")->required();
    st->add_option("--n", count, "sample count")->required();
    st->add_option("--delta", delta, "noise std-dev");
    st->add_option("--seed", seed, "random seed");
    st->add_option("--out", out, "output directory");
    st->callback([&]() { std::exit(cmd_synth_stiefel(n1, n2, count, delta, seed, out)); });

    auto* toy = synth->add_subcommand("toy", "two-part toy dataset (segment + half square)");
    static int tcount = 5000;
    static uint64_t tseed = 1;
    static std::string tout;
    toy->add_option("--n", tcount, "sample count")->required();
    toy->add_option("--seed", tseed, "random seed");
    toy->add_option("--out", tout, "output directory");
    toy->callback([&]() { std::exit(cmd_synth_toy(tcount, tseed, tout)); });
  }

  // train
  static TrainCli tc;
  auto* train = app.add_subcommand("train", "train an autoencoder (alternating algorithm or CAE+H)");
  train->add_option("--data", tc.data_path, "dataset CSV")->required();
  train->add_option("--label-col", tc.label_col, "label column (-1 = last; default none)");
  train->add_flag("--skip-header", tc.skip_header, "skip the first CSV line");
  train->add_option("--method", tc.method, "as | caeh")->check(CLI::IsMember({"as", "caeh"}));
  train->add_option("--kappa", tc.kappa, "curvature mode: 0, 1 or 2")->check(CLI::Range(0, 2));
  train->add_option("--hidden", tc.hidden, "comma-separated hidden widths (default 4n)");
  train->add_option("--code-dim", tc.code_dim, "code dimension d (default n)");
  train->add_option("--train-fraction", tc.train_fraction, "train fraction; rest becomes test");
  train->add_option("--config", tc.config_path, "key = value config file (TrainConfig field names)");
  train->add_option("--resume", tc.resume_path, "resume from a state.json");
  train->add_option("--out", tc.out_flag, "output directory");
  train->add_option("--grid", tc.grid, "sweep, e.g. lambda=1,4,16;gamma=0,0.5");
  train->add_option("--m,--batch", tc.cfg.m, "minibatch size m");
  train->add_option("--lambda", tc.cfg.lambda, "rank-penalty weight");
  train->add_option("--gamma", tc.cfg.gamma, "curvature weight");
  train->add_option("--sigma", tc.cfg.sigma, "perturbation std-dev");
  train->add_option("--alpha", tc.cfg.alpha, "Adam step size");
  train->add_option("--beta1", tc.cfg.beta1, "Adam beta1");
  train->add_option("--beta2", tc.cfg.beta2, "Adam beta2");
  train->add_option("--T,--rounds", tc.cfg.T, "outer rounds T");
  train->add_option("--M,--anchors", tc.cfg.M, "anchor count M");
  train->add_option("--k", tc.cfg.k, "target rank k");
  train->add_option("--inner-max-epochs", tc.cfg.inner_max_epochs, "inner epoch cap per round");
  train->add_option("--inner-tol", tc.cfg.inner_tol, "inner convergence tolerance");
  train->add_option("--seed", tc.cfg.seed, "run seed");
  train->callback([&]() {
    if (!tc.config_path.empty()) {
      // CLI flags override file values: parse the file into the defaults,
      // then re-let the parsed CLI values win by re-reading them.
      rcae::TrainConfig from_file = rcae::parse_train_config(tc.config_path, rcae::TrainConfig{});
      rcae::TrainConfig merged = from_file;
      const CLI::App* t = train;
      auto taken = [&](const std::string& flag) { return t->count(flag) > 0; };
      if (taken("--m")) merged.m = tc.cfg.m;
      if (taken("--lambda")) merged.lambda = tc.cfg.lambda;
      if (taken("--gamma")) merged.gamma = tc.cfg.gamma;
      if (taken("--sigma")) merged.sigma = tc.cfg.sigma;
      if (taken("--alpha")) merged.alpha = tc.cfg.alpha;
      if (taken("--beta1")) merged.beta1 = tc.cfg.beta1;
      if (taken("--beta2")) merged.beta2 = tc.cfg.beta2;
      if (taken("--T")) merged.T = tc.cfg.T;
      if (taken("--M")) merged.M = tc.cfg.M;
      if (taken("--k")) merged.k = tc.cfg.k;
      if (taken("--inner-max-epochs")) merged.inner_max_epochs = tc.cfg.inner_max_epochs;
      if (taken("--inner-tol")) merged.inner_tol = tc.cfg.inner_tol;
      if (taken("--seed")) merged.seed = tc.cfg.seed;
      tc.cfg = merged;
    }
    tc.rounds_given = train->count("--T") > 0;
    if (tc.kappa >= 0)
      tc.cfg.curvature_mode = tc.kappa == 0   ? rcae::CurvatureKind::kKappa0
                              : tc.kappa == 1 ? rcae::CurvatureKind::kKappa1
                                              : rcae::CurvatureKind::kKappa2;
    std::exit(cmd_train(tc));
  });

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a trained checkpoint");
  static std::string e_checkpoint, e_data, e_mode = "stiefel", e_spec, e_beta_grid = "0,0.01,0.1";
  static std::string e_out;
  static int e_label_col = -1, e_samples = 2000, e_kmax = 19, e_tangent_k = 2;
  static bool e_skip_header = false;
  static double e_train_fraction = 0.7;
  static uint64_t e_seed = 1;
  ev->add_option("--checkpoint", e_checkpoint, "checkpoint.json")->required();
  ev->add_option("--data", e_data, "dataset CSV (knn / mtc modes)");
  ev->add_option("--label-col", e_label_col, "label column (-1 = last)");
  ev->add_flag("--skip-header", e_skip_header, "skip the first CSV line");
  ev->add_option("--metrics", e_mode, "stiefel | knn | mtc")
      ->check(CLI::IsMember({"stiefel", "knn", "mtc"}));
  ev->add_option("--spec", e_spec, "meta.json of the Stiefel dataset");
  ev->add_option("--eval-samples", e_samples, "Monte-Carlo samples for stiefel metrics");
  ev->add_option("--kmax", e_kmax, "K sweep upper bound");
  ev->add_option("--beta-grid", e_beta_grid, "comma list of MTC beta values");
  ev->add_option("--tangent-k", e_tangent_k, "tangent basis size for MTC");
  ev->add_option("--train-fraction", e_train_fraction, "split when dataset has none");
  ev->add_option("--seed", e_seed, "evaluation seed");
  ev->add_option("--out", e_out, "output directory");
  ev->callback([&]() {
    std::exit(cmd_eval(e_checkpoint, e_data, e_label_col, e_skip_header, e_mode, e_spec, e_samples,
                       e_kmax, e_beta_grid, e_tangent_k, e_train_fraction, e_seed, e_out));
  });

  // verify
  auto* verify = app.add_subcommand("verify", "numerical verification suites");
  verify->require_subcommand(1);
  {
    auto* sphere = verify->add_subcommand("sphere", "curvature bound on the sphere map");
    static int s_n = 3;
    static double s_radius = 1.0;
    sphere->add_option("--n", s_n, "ambient dimension");
    sphere->add_option("--radius", s_radius, "sphere radius");
    sphere->callback([&]() { std::exit(report_and_exit(rcae::verify::sphere_checks(s_n, s_radius))); });

    auto* grads = verify->add_subcommand("gradients", "finite-difference gradient checks");
    static uint64_t g_seed = 3;
    static int g_nets = 5;
    grads->add_option("--seed", g_seed, "seed");
    grads->add_option("--nets", g_nets, "number of seeded nets");
    grads->callback([&]() { std::exit(report_and_exit(rcae::verify::gradient_checks(g_nets, g_seed))); });

    auto* ey = verify->add_subcommand("eckart-young", "Ky-Fan / truncation identity");
    static int y_trials = 50;
    static uint64_t y_seed = 5;
    ey->add_option("--trials", y_trials, "random matrices");
    ey->add_option("--seed", y_seed, "seed");
    ey->callback([&]() { std::exit(report_and_exit(rcae::verify::eckart_young_checks(y_trials, y_seed))); });

    auto* t5 = verify->add_subcommand("theorem5", "encoder-decoder curvature bound");
    static int t_trials = 5;
    static uint64_t t_seed = 11;
    t5->add_option("--trials", t_trials, "seeded pairs");
    t5->add_option("--seed", t_seed, "seed");
    t5->callback([&]() { std::exit(report_and_exit(rcae::verify::theorem5_checks(t_trials, t_seed))); });

    auto* all = verify->add_subcommand("all", "run every verification suite");
    all->callback([&]() {
      std::vector<rcae::verify::CheckResult> rs;
      for (auto& r : rcae::verify::eckart_young_checks(50, 5)) rs.push_back(r);
      for (auto& r : rcae::verify::gradient_checks(5, 3)) rs.push_back(r);
      for (auto& r : rcae::verify::sphere_checks(3, 1.0)) rs.push_back(r);
      for (auto& r : rcae::verify::sphere_checks(5, 1.0)) rs.push_back(r);
      for (auto& r : rcae::verify::theorem5_checks(5, 11)) rs.push_back(r);
      std::exit(report_and_exit(rs));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
