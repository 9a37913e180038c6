#pragma once

#include <memory>
#include <vector>

#include "rcae/matrix.hpp"
#include "rcae/net.hpp"

namespace rcae {

/// Twice-differentiable map interface used by the curvature verifiers.
class DifferentiableMap {
 public:
  virtual ~DifferentiableMap() = default;
  virtual int in_dim() const = 0;
  virtual int out_dim() const = 0;
  virtual Vec value(const Vec& x) const = 0;
  virtual Matrix jacobian(const Vec& x) const = 0;  // out_dim x in_dim
  /// One in_dim x in_dim Hessian per output component.
  virtual std::vector<Matrix> hessians(const Vec& x) const = 0;
};

/// Hessians by central finite differences of the exact Jacobian,
/// symmetrized; used by the net-backed maps below.
std::vector<Matrix> fd_hessians(const DifferentiableMap& map, const Vec& x, double step = 1e-4);

/// Full autoencoder x -> g(x).
class FullNetMap : public DifferentiableMap {
 public:
  explicit FullNetMap(const AutoencoderNet& net) : net_(net) {}
  int in_dim() const override { return net_.ambient_dim(); }
  int out_dim() const override { return net_.ambient_dim(); }
  Vec value(const Vec& x) const override { return forward(net_, x).output; }
  Matrix jacobian(const Vec& x) const override { return input_jacobians(net_, x).full(); }
  std::vector<Matrix> hessians(const Vec& x) const override { return component_hessians(net_, x); }

 private:
  const AutoencoderNet& net_;
};

/// Encoder half x -> e(x).
class EncoderMap : public DifferentiableMap {
 public:
  explicit EncoderMap(const AutoencoderNet& net) : net_(net) {}
  int in_dim() const override { return net_.ambient_dim(); }
  int out_dim() const override { return net_.code_dim(); }
  Vec value(const Vec& x) const override { return forward(net_, x).code; }
  Matrix jacobian(const Vec& x) const override { return input_jacobians(net_, x).j_encoder; }
  std::vector<Matrix> hessians(const Vec& x) const override { return fd_hessians(*this, x); }

 private:
  const AutoencoderNet& net_;
};

/// Decoder half as a map of the code variable, c -> d(c).
class DecoderMap : public DifferentiableMap {
 public:
  explicit DecoderMap(const AutoencoderNet& net) : net_(net) {}
  int in_dim() const override { return net_.code_dim(); }
  int out_dim() const override { return net_.ambient_dim(); }
  Vec value(const Vec& c) const override { return decoder_forward(net_, c); }
  Matrix jacobian(const Vec& c) const override { return decoder_input_jacobian(net_, c); }
  std::vector<Matrix> hessians(const Vec& c) const override { return fd_hessians(*this, c); }

 private:
  const AutoencoderNet& net_;
};

/// g(x) = radius * x / ||x||, the analytic sphere oracle. Every image curve
/// is a great circle, so the curvature bound equals 1 / radius at every
/// point away from the origin.
class SphereMap : public DifferentiableMap {
 public:
  explicit SphereMap(int n, double radius = 1.0) : n_(n), radius_(radius) {}
  int in_dim() const override { return n_; }
  int out_dim() const override { return n_; }
  Vec value(const Vec& x) const override;
  Matrix jacobian(const Vec& x) const override;
  std::vector<Matrix> hessians(const Vec& x) const override;

 private:
  int n_;
  double radius_;
};

/// Affine map x -> A x + b (zero Hessians).
class AffineMap : public DifferentiableMap {
 public:
  AffineMap(Matrix a, Vec b) : a_(std::move(a)), b_(std::move(b)) {}
  int in_dim() const override { return a_.cols(); }
  int out_dim() const override { return a_.rows(); }
  Vec value(const Vec& x) const override { return vec_add(a_.apply(x), b_); }
  Matrix jacobian(const Vec&) const override { return a_; }
  std::vector<Matrix> hessians(const Vec&) const override {
    return std::vector<Matrix>(a_.rows(), Matrix(a_.cols(), a_.cols()));
  }

 private:
  Matrix a_;
  Vec b_;
};

struct CurvatureEstimate {
  double value = 0.0;
  double epsilon_scale = 0.0;  // the ||eps|| the value was evaluated at
  int direction_count = 0;
  std::vector<std::pair<double, double>> convergence_trace;  // (scale, max quotient)
};

/// Default geometric ladder 1e-1 .. ~1e-4, factor 1/2.
std::vector<double> default_scale_ladder();
/// 2n axis directions plus `extra` seeded random unit vectors.
std::vector<Vec> default_directions(int n, int extra = 32, uint64_t seed = 20240901);

/// Finite-scale evaluation of the curvature upper bound
///   min_lambda ||[eps^T H_i eps] - lambda J eps|| / ||J eps||^2
/// at eps = scale * direction; per scale the maximum over directions, with
/// the lambda-minimum in closed form (projection residual). Directions in
/// the Jacobian kernel are skipped; if every direction is skipped the point
/// is degenerate and an error is thrown.
CurvatureEstimate theorem4_bound(const DifferentiableMap& map, const Vec& x,
                                 const std::vector<double>& scales,
                                 const std::vector<Vec>& directions);
CurvatureEstimate theorem4_bound(const DifferentiableMap& map, const Vec& x);

/// Right-hand side of the encoder-decoder curvature bound:
///   sigma_1 C(e) / sigma_k^2 + sqrt(sum_i ||H_{d_i}||_F^2) / sigma_k^2,
/// with C(e) estimated by theorem4_bound on the encoder over the same
/// ladder and directions. sigma are the singular values of J_d at e(x);
/// sigma_k below 1e-10 is a rank-deficient decoder error.
double theorem5_rhs(const DifferentiableMap& encoder, const DifferentiableMap& decoder,
                    const Vec& x, const std::vector<double>& scales,
                    const std::vector<Vec>& directions);
double theorem5_rhs(const DifferentiableMap& encoder, const DifferentiableMap& decoder, const Vec& x);

/// Curvature of a curve from its first two derivatives at 0:
/// ||g' ^ g''|| / ||g'||^3. Zero speed is a domain error.
double curve_curvature(const Vec& first_derivative, const Vec& second_derivative);

struct TangentBasis {
  std::vector<Vec> vectors;  // k orthonormal vectors in R^n
  Vec at_point;

  Matrix as_matrix() const;  // n x k
  /// Orthogonal projector U U^T onto the spanned subspace.
  Matrix projector() const;
};

/// First k left singular vectors of J_g(x): a basis of the learned
/// manifold's tangent space at g(x). Throws with the spectrum when
/// sigma_k is numerically zero.
TangentBasis tangent_basis(const AutoencoderNet& net, const Vec& x, int k);

}  // namespace rcae
