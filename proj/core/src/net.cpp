#include "rcae/net.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rcae/rng.hpp"

namespace rcae {

int AutoencoderNet::param_count() const {
  int n = 0;
  for (const auto& l : all_layers()) n += l.in_dim * l.out_dim + l.out_dim;
  return n;
}

std::vector<LayerSpec> AutoencoderNet::all_layers() const {
  std::vector<LayerSpec> layers = encoder_layers;
  layers.insert(layers.end(), decoder_layers.begin(), decoder_layers.end());
  return layers;
}

void AutoencoderNet::validate() const {
  if (encoder_layers.empty() || decoder_layers.empty())
    throw std::invalid_argument("net: encoder and decoder must be non-empty");
  const auto layers = all_layers();
  for (size_t i = 1; i < layers.size(); ++i)
    if (layers[i].in_dim != layers[i - 1].out_dim)
      throw std::invalid_argument("net: layer dim chain broken at layer " + std::to_string(i));
  if (encoder_layers.back().out_dim != decoder_layers.front().in_dim)
    throw std::invalid_argument("net: code dimension mismatch");
  if (encoder_layers.front().in_dim != decoder_layers.back().out_dim)
    throw std::invalid_argument("net: ambient dimension mismatch");
  if (static_cast<int>(theta.size()) != param_count())
    throw std::invalid_argument("net: theta length " + std::to_string(theta.size()) +
                                " != parameter count " + std::to_string(param_count()));
  if (!vec_all_finite(theta)) throw std::invalid_argument("net: non-finite theta");
}

AutoencoderNet make_autoencoder(const std::vector<int>& encoder_dims,
                                const std::vector<int>& decoder_dims, uint64_t seed) {
  if (encoder_dims.size() < 2 || decoder_dims.size() < 2)
    throw std::invalid_argument("make_autoencoder: need at least two dims per side");
  AutoencoderNet net;
  for (size_t i = 0; i + 1 < encoder_dims.size(); ++i)
    net.encoder_layers.push_back({encoder_dims[i], encoder_dims[i + 1], Activation::kTanh});
  for (size_t i = 0; i + 1 < decoder_dims.size(); ++i)
    net.decoder_layers.push_back({decoder_dims[i], decoder_dims[i + 1], Activation::kTanh});
  net.decoder_layers.back().activation = Activation::kIdentity;

  Rng rng(seed);
  net.theta.clear();
  for (const auto& l : net.all_layers()) {
    const double s = std::sqrt(6.0 / (l.in_dim + l.out_dim));
    for (int i = 0; i < l.in_dim * l.out_dim; ++i) net.theta.push_back(rng.uniform(-s, s));
    for (int i = 0; i < l.out_dim; ++i) net.theta.push_back(0.0);
  }
  net.validate();
  return net;
}

AutoencoderNet make_autoencoder_mirrored(int ambient_dim, const std::vector<int>& hidden_dims,
                                         int code_dim, uint64_t seed) {
  std::vector<int> enc{ambient_dim};
  enc.insert(enc.end(), hidden_dims.begin(), hidden_dims.end());
  enc.push_back(code_dim);
  std::vector<int> dec{code_dim};
  dec.insert(dec.end(), hidden_dims.rbegin(), hidden_dims.rend());
  dec.push_back(ambient_dim);
  return make_autoencoder(enc, dec, seed);
}

namespace {

inline double act(Activation a, double z) { return a == Activation::kTanh ? std::tanh(z) : z; }

// Runs layers on x, optionally propagating dh/dx. theta_pos indexes the flat
// parameter vector at the first layer's weight block.
void run_layers(const std::vector<LayerSpec>& layers, const Vec& theta, size_t theta_pos, Vec& h,
                Matrix* jac) {
  for (const auto& l : layers) {
    Vec z(l.out_dim, 0.0);
    const double* w = theta.data() + theta_pos;
    for (int i = 0; i < l.out_dim; ++i) {
      const double* wrow = w + static_cast<size_t>(i) * l.in_dim;
      double s = 0.0;
      for (int j = 0; j < l.in_dim; ++j) s += wrow[j] * h[j];
      z[i] = s;
    }
    const double* b = w + static_cast<size_t>(l.out_dim) * l.in_dim;
    for (int i = 0; i < l.out_dim; ++i) z[i] += b[i];

    if (jac) {
      // J <- diag(act'(z)) * W * J
      Matrix next(l.out_dim, jac->cols());
      for (int i = 0; i < l.out_dim; ++i) {
        const double* wrow = w + static_cast<size_t>(i) * l.in_dim;
        for (int k = 0; k < l.in_dim; ++k) {
          const double wik = wrow[k];
          if (wik == 0.0) continue;
          for (int c = 0; c < jac->cols(); ++c) next(i, c) += wik * (*jac)(k, c);
        }
      }
      if (l.activation == Activation::kTanh) {
        for (int i = 0; i < l.out_dim; ++i) {
          const double t = std::tanh(z[i]);
          const double dp = 1.0 - t * t;
          for (int c = 0; c < next.cols(); ++c) next(i, c) *= dp;
        }
      }
      *jac = std::move(next);
    }

    Vec hn(l.out_dim);
    for (int i = 0; i < l.out_dim; ++i) hn[i] = act(l.activation, z[i]);
    h = std::move(hn);
    theta_pos += static_cast<size_t>(l.out_dim) * l.in_dim + l.out_dim;
  }
}

size_t encoder_param_size(const AutoencoderNet& net) {
  size_t n = 0;
  for (const auto& l : net.encoder_layers) n += static_cast<size_t>(l.in_dim) * l.out_dim + l.out_dim;
  return n;
}

}  // namespace

ForwardResult forward(const AutoencoderNet& net, const Vec& x) {
  if (static_cast<int>(x.size()) != net.ambient_dim())
    throw std::invalid_argument("forward: input length " + std::to_string(x.size()) +
                                " != ambient dim " + std::to_string(net.ambient_dim()));
  if (!vec_all_finite(x)) throw std::invalid_argument("forward: non-finite input");
  ForwardResult r;
  Vec h = x;
  run_layers(net.encoder_layers, net.theta, 0, h, nullptr);
  r.code = h;
  run_layers(net.decoder_layers, net.theta, encoder_param_size(net), h, nullptr);
  r.output = std::move(h);
  return r;
}

JacobianPair input_jacobians(const AutoencoderNet& net, const Vec& x) {
  if (static_cast<int>(x.size()) != net.ambient_dim())
    throw std::invalid_argument("input_jacobians: input length mismatch");
  JacobianPair p;
  Vec h = x;
  Matrix je = Matrix::identity(net.ambient_dim());
  run_layers(net.encoder_layers, net.theta, 0, h, &je);
  p.j_encoder = std::move(je);

  Matrix jd = Matrix::identity(net.code_dim());
  run_layers(net.decoder_layers, net.theta, encoder_param_size(net), h, &jd);
  p.j_decoder = std::move(jd);
  return p;
}

Vec decoder_forward(const AutoencoderNet& net, const Vec& code) {
  if (static_cast<int>(code.size()) != net.code_dim())
    throw std::invalid_argument("decoder_forward: code length mismatch");
  Vec h = code;
  run_layers(net.decoder_layers, net.theta, encoder_param_size(net), h, nullptr);
  return h;
}

Matrix decoder_input_jacobian(const AutoencoderNet& net, const Vec& code) {
  if (static_cast<int>(code.size()) != net.code_dim())
    throw std::invalid_argument("decoder_input_jacobian: code length mismatch");
  Vec h = code;
  Matrix jd = Matrix::identity(net.code_dim());
  run_layers(net.decoder_layers, net.theta, encoder_param_size(net), h, &jd);
  return jd;
}

std::vector<Matrix> component_hessians(const AutoencoderNet& net, const Vec& x) {
  const int n = net.ambient_dim();
  const double step = 1e-4;
  std::vector<Matrix> h(n, Matrix(n, n));
  for (int b = 0; b < n; ++b) {
    Vec xp = x, xm = x;
    xp[b] += step;
    xm[b] -= step;
    const Matrix jp = input_jacobians(net, xp).full();
    const Matrix jm = input_jacobians(net, xm).full();
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) h[i](a, b) = (jp(i, a) - jm(i, a)) / (2.0 * step);
  }
  for (auto& hi : h) {
    const Matrix ht = hi.transposed();
    hi = (hi + ht).scaled(0.5);
  }
  return h;
}

TapeNet::TapeNet(ad::Tape& tape, const AutoencoderNet& net) : tape_(tape), net_(net) {
  size_t pos = 0;
  for (const auto& l : net.all_layers()) {
    Matrix w(l.out_dim, l.in_dim);
    for (int i = 0; i < l.out_dim; ++i)
      for (int j = 0; j < l.in_dim; ++j) w(i, j) = net.theta[pos + static_cast<size_t>(i) * l.in_dim + j];
    pos += static_cast<size_t>(l.out_dim) * l.in_dim;
    Matrix b(l.out_dim, 1);
    for (int i = 0; i < l.out_dim; ++i) b(i, 0) = net.theta[pos + i];
    pos += l.out_dim;
    weights_.push_back(tape_.param(std::move(w)));
    biases_.push_back(tape_.param(std::move(b)));
  }
}

TapeNet::Eval TapeNet::eval(const Vec& x, bool with_jacobian) {
  Eval e = eval_encoder(x, with_jacobian);
  const size_t enc_count = net_.encoder_layers.size();

  ad::NodeId h = e.code;
  ad::NodeId j = with_jacobian ? tape_.constant(Matrix::identity(net_.code_dim())) : -1;
  for (size_t li = 0; li < net_.decoder_layers.size(); ++li) {
    const auto& l = net_.decoder_layers[li];
    const ad::NodeId w = weights_[enc_count + li];
    const ad::NodeId b = biases_[enc_count + li];
    const ad::NodeId z = tape_.add(tape_.matmul(w, h), b);
    if (l.activation == Activation::kTanh) {
      h = tape_.tanh_of(z);
      if (with_jacobian) j = tape_.scale_rows(tape_.matmul(w, j), tape_.one_minus_square(h));
    } else {
      h = z;
      if (with_jacobian) j = tape_.matmul(w, j);
    }
  }
  e.output = h;
  if (with_jacobian) {
    e.j_decoder = j;
    e.j_full = tape_.matmul(e.j_decoder, e.j_encoder);
  }
  return e;
}

TapeNet::Eval TapeNet::eval_encoder(const Vec& x, bool with_jacobian) {
  if (static_cast<int>(x.size()) != net_.ambient_dim())
    throw std::invalid_argument("TapeNet::eval: input length mismatch");
  Eval e;
  ad::NodeId h = tape_.constant(Matrix::column(x));
  ad::NodeId j = with_jacobian ? tape_.constant(Matrix::identity(net_.ambient_dim())) : -1;
  for (size_t li = 0; li < net_.encoder_layers.size(); ++li) {
    const auto& l = net_.encoder_layers[li];
    const ad::NodeId z = tape_.add(tape_.matmul(weights_[li], h), biases_[li]);
    if (l.activation == Activation::kTanh) {
      h = tape_.tanh_of(z);
      if (with_jacobian)
        j = tape_.scale_rows(tape_.matmul(weights_[li], j), tape_.one_minus_square(h));
    } else {
      h = z;
      if (with_jacobian) j = tape_.matmul(weights_[li], j);
    }
  }
  e.code = h;
  if (with_jacobian) e.j_encoder = j;
  return e;
}

Vec TapeNet::gather_gradient() const {
  Vec g;
  g.reserve(net_.theta.size());
  const auto layers = net_.all_layers();
  for (size_t li = 0; li < layers.size(); ++li) {
    const Matrix gw = tape_.grad_or_zero(weights_[li]);
    for (int i = 0; i < gw.rows(); ++i)
      for (int j = 0; j < gw.cols(); ++j) g.push_back(gw(i, j));
    const Matrix gb = tape_.grad_or_zero(biases_[li]);
    for (int i = 0; i < gb.rows(); ++i) g.push_back(gb(i, 0));
  }
  return g;
}

LossEval loss_gradient(const AutoencoderNet& net,
                       const std::function<ad::NodeId(ad::Tape&, TapeNet&)>& build_loss) {
  ad::Tape tape;
  TapeNet tn(tape, net);
  const ad::NodeId loss = build_loss(tape, tn);
  LossEval out;
  out.value = tape.scalar(loss);
  if (!std::isfinite(out.value)) throw std::runtime_error("loss_gradient: non-finite loss value");
  tape.backward(loss);
  out.gradient = tn.gather_gradient();
  if (!vec_all_finite(out.gradient)) throw std::runtime_error("loss_gradient: non-finite gradient");
  return out;
}

namespace {

nlohmann::json layers_to_json(const std::vector<LayerSpec>& layers) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : layers)
    arr.push_back({{"in", l.in_dim},
                   {"out", l.out_dim},
                   {"activation", l.activation == Activation::kTanh ? "tanh" : "identity"}});
  return arr;
}

std::vector<LayerSpec> layers_from_json(const nlohmann::json& arr) {
  std::vector<LayerSpec> layers;
  for (const auto& j : arr) {
    const std::string a = j.at("activation").get<std::string>();
    if (a != "tanh" && a != "identity")
      throw std::runtime_error("checkpoint: unknown activation '" + a + "'");
    layers.push_back({j.at("in").get<int>(), j.at("out").get<int>(),
                      a == "tanh" ? Activation::kTanh : Activation::kIdentity});
  }
  return layers;
}

}  // namespace

void save_checkpoint(const AutoencoderNet& net, const std::string& path) {
  nlohmann::json j;
  j["format"] = "rcae-checkpoint-v1";
  j["encoder"] = layers_to_json(net.encoder_layers);
  j["decoder"] = layers_to_json(net.decoder_layers);
  j["theta"] = net.theta;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

AutoencoderNet load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "rcae-checkpoint-v1")
    throw std::runtime_error("checkpoint: unknown format in " + path);
  AutoencoderNet net;
  net.encoder_layers = layers_from_json(j.at("encoder"));
  net.decoder_layers = layers_from_json(j.at("decoder"));
  net.theta = j.at("theta").get<Vec>();
  net.validate();
  return net;
}

}  // namespace rcae
