#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rcae/autodiff.hpp"
#include "rcae/matrix.hpp"

namespace rcae {

enum class Activation { kTanh, kIdentity };

struct LayerSpec {
  int in_dim;
  int out_dim;
  Activation activation;
};

/// Encoder and decoder Jacobians of the autoencoder at a point. The chain
/// rule gives the full Jacobian as the product: J_g(x) = j_decoder(e(x)) *
/// j_encoder(x).
struct JacobianPair {
  Matrix j_encoder;  // d x n
  Matrix j_decoder;  // n x d
  Matrix full() const { return j_decoder * j_encoder; }
};

/// Feedforward autoencoder g = d o e with a flat parameter vector. Layer
/// parameters are stored in layer order, each layer as the row-major weight
/// block (out_dim x in_dim) followed by the bias (out_dim). Values are
/// immutable in all evaluation paths; training produces successor nets.
struct AutoencoderNet {
  std::vector<LayerSpec> encoder_layers;
  std::vector<LayerSpec> decoder_layers;
  Vec theta;

  int ambient_dim() const { return encoder_layers.front().in_dim; }
  int code_dim() const { return encoder_layers.back().out_dim; }
  int param_count() const;
  std::vector<LayerSpec> all_layers() const;

  /// Validates the layer chain and theta length; throws std::invalid_argument.
  void validate() const;
};

/// Net with the given encoder/decoder dims, tanh hidden layers, identity
/// final decoder layer, biases zero, weights uniform in [-s, s] with
/// s = sqrt(6 / (in + out)), seeded.
AutoencoderNet make_autoencoder(const std::vector<int>& encoder_dims,
                                const std::vector<int>& decoder_dims, uint64_t seed);
/// Convenience: ambient -> hidden... -> code -> reversed hidden... -> ambient.
AutoencoderNet make_autoencoder_mirrored(int ambient_dim, const std::vector<int>& hidden_dims,
                                         int code_dim, uint64_t seed);

struct ForwardResult {
  Vec code;
  Vec output;
};
ForwardResult forward(const AutoencoderNet& net, const Vec& x);

/// Exact input-space Jacobians by forward propagation through the layers.
JacobianPair input_jacobians(const AutoencoderNet& net, const Vec& x);

/// Decoder half evaluated on a code vector.
Vec decoder_forward(const AutoencoderNet& net, const Vec& code);
/// d(decoder)/d(code) at the given code.
Matrix decoder_input_jacobian(const AutoencoderNet& net, const Vec& code);

/// Hessian of each output component of g, by central finite differences of
/// the exact Jacobian (step 1e-4), symmetrized. Verification-path only.
std::vector<Matrix> component_hessians(const AutoencoderNet& net, const Vec& x);

/// The autoencoder embedded in a tape so that scalar losses built from its
/// outputs and Jacobians differentiate exactly with respect to theta.
class TapeNet {
 public:
  TapeNet(ad::Tape& tape, const AutoencoderNet& net);

  struct Eval {
    ad::NodeId code = -1;
    ad::NodeId output = -1;
    ad::NodeId j_encoder = -1;  // valid when requested
    ad::NodeId j_decoder = -1;
    ad::NodeId j_full = -1;
  };
  Eval eval(const Vec& x, bool with_jacobian);
  /// Encoder only; j_encoder populated when with_jacobian.
  Eval eval_encoder(const Vec& x, bool with_jacobian);

  /// Flat d(loss)/d(theta) in the net's parameter layout. Call after
  /// tape.backward().
  Vec gather_gradient() const;

  ad::Tape& tape() { return tape_; }

 private:
  ad::Tape& tape_;
  const AutoencoderNet& net_;
  std::vector<ad::NodeId> weights_;
  std::vector<ad::NodeId> biases_;
};

struct LossEval {
  double value;
  Vec gradient;
};

/// Evaluates a scalar loss built on a fresh tape and returns its value and
/// exact theta-gradient. The builder receives the tape-embedded net and must
/// return a scalar node. Throws std::runtime_error naming the problem if the
/// loss or gradient is non-finite.
LossEval loss_gradient(const AutoencoderNet& net,
                       const std::function<ad::NodeId(ad::Tape&, TapeNet&)>& build_loss);

/// Self-describing checkpoint (JSON text); theta round-trips bit-exact.
void save_checkpoint(const AutoencoderNet& net, const std::string& path);
AutoencoderNet load_checkpoint(const std::string& path);

}  // namespace rcae
