#include "rcae/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rcae/csv.hpp"
#include "rcae/rng.hpp"
#include "rcae/svd.hpp"

namespace rcae {

std::vector<Matrix> fd_hessians(const DifferentiableMap& map, const Vec& x, double step) {
  const int n = map.in_dim();
  const int m = map.out_dim();
  std::vector<Matrix> h(m, Matrix(n, n));
  for (int b = 0; b < n; ++b) {
    Vec xp = x, xm = x;
    xp[b] += step;
    xm[b] -= step;
    const Matrix jp = map.jacobian(xp);
    const Matrix jm = map.jacobian(xm);
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < n; ++a) h[i](a, b) = (jp(i, a) - jm(i, a)) / (2.0 * step);
  }
  for (auto& hi : h) {
    const Matrix ht = hi.transposed();
    hi = (hi + ht).scaled(0.5);
  }
  return h;
}

Vec SphereMap::value(const Vec& x) const {
  const double nx = norm(x);
  if (nx == 0.0) throw std::invalid_argument("SphereMap: undefined at the origin");
  return vec_scale(x, radius_ / nx);
}

Matrix SphereMap::jacobian(const Vec& x) const {
  const double nx = norm(x);
  if (nx == 0.0) throw std::invalid_argument("SphereMap: undefined at the origin");
  Matrix j(n_, n_);
  const double inv = radius_ / nx;
  const double inv3 = radius_ / (nx * nx * nx);
  for (int i = 0; i < n_; ++i) {
    j(i, i) = inv;
    for (int a = 0; a < n_; ++a) j(i, a) -= inv3 * x[i] * x[a];
  }
  return j;
}

std::vector<Matrix> SphereMap::hessians(const Vec& x) const {
  const double nx = norm(x);
  if (nx == 0.0) throw std::invalid_argument("SphereMap: undefined at the origin");
  const double n3 = nx * nx * nx;
  const double n5 = n3 * nx * nx;
  std::vector<Matrix> h(n_, Matrix(n_, n_));
  for (int i = 0; i < n_; ++i) {
    Matrix& hi = h[i];
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        double v = 0.0;
        if (a == i) v -= x[b] / n3;
        if (b == i) v -= x[a] / n3;
        if (a == b) v -= x[i] / n3;
        v += 3.0 * x[i] * x[a] * x[b] / n5;
        hi(a, b) = radius_ * v;
      }
  }
  return h;
}

std::vector<double> default_scale_ladder() {
  std::vector<double> scales;
  for (double s = 1e-1; s > 0.9e-4; s *= 0.5) scales.push_back(s);
  return scales;
}

std::vector<Vec> default_directions(int n, int extra, uint64_t seed) {
  std::vector<Vec> dirs;
  dirs.reserve(2 * n + extra);
  for (int i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
    e[i] = -1.0;
    dirs.push_back(e);
  }
  Rng rng(seed);
  for (int i = 0; i < extra; ++i) dirs.push_back(rng.unit_vec(n));
  return dirs;
}

CurvatureEstimate theorem4_bound(const DifferentiableMap& map, const Vec& x,
                                 const std::vector<double>& scales,
                                 const std::vector<Vec>& directions) {
  if (scales.empty() || directions.empty())
    throw std::invalid_argument("theorem4_bound: scales and directions must be non-empty");
  for (size_t i = 1; i < scales.size(); ++i)
    if (scales[i] >= scales[i - 1])
      throw std::invalid_argument("theorem4_bound: scales must be strictly decreasing");

  const Matrix j = map.jacobian(x);
  const std::vector<Matrix> hess = map.hessians(x);
  const double jnorm = std::max(1.0, j.frobenius_norm());

  CurvatureEstimate est;
  est.direction_count = static_cast<int>(directions.size());

  for (double s : scales) {
    double worst = 0.0;
    bool any = false;
    for (const Vec& u : directions) {
      const Vec eps = vec_scale(u, s);
      const Vec a = j.apply(eps);
      const double an = norm(a);
      if (an <= 1e-12 * s * jnorm) continue;  // kernel direction, skipped
      any = true;
      Vec b(hess.size());
      for (size_t i = 0; i < hess.size(); ++i) {
        // eps^T H_i eps
        double v = 0.0;
        const Matrix& hi = hess[i];
        for (int p = 0; p < hi.rows(); ++p) {
          double rowdot = 0.0;
          for (int q = 0; q < hi.cols(); ++q) rowdot += hi(p, q) * eps[q];
          v += eps[p] * rowdot;
        }
        b[i] = v;
      }
      // min over lambda of ||b - lambda a|| is the projection residual
      const double lam = dot(a, b) / (an * an);
      const Vec res = vec_sub(b, vec_scale(a, lam));
      const double q = norm(res) / (an * an);
      worst = std::max(worst, q);
    }
    if (!any)
      throw std::runtime_error("theorem4_bound: degenerate point (all directions in the kernel)");
    est.convergence_trace.emplace_back(s, worst);
  }
  est.epsilon_scale = est.convergence_trace.back().first;
  est.value = est.convergence_trace.back().second;
  return est;
}

CurvatureEstimate theorem4_bound(const DifferentiableMap& map, const Vec& x) {
  return theorem4_bound(map, x, default_scale_ladder(), default_directions(map.in_dim()));
}

double theorem5_rhs(const DifferentiableMap& encoder, const DifferentiableMap& decoder,
                    const Vec& x, const std::vector<double>& scales,
                    const std::vector<Vec>& directions) {
  const Vec code = encoder.value(x);
  const Matrix jd = decoder.jacobian(code);
  const SvdFactors f = svd(jd);
  const int k = decoder.in_dim();
  const double sigma1 = f.singular_values.front();
  const double sigmak = f.singular_values[k - 1];
  if (sigmak < 1e-10) {
    std::ostringstream os;
    os << "theorem5_rhs: decoder rank-deficient (sigma_" << k << " = " << sigmak << ")";
    throw std::runtime_error(os.str());
  }
  const CurvatureEstimate ce = theorem4_bound(encoder, x, scales, directions);
  const std::vector<Matrix> hd = decoder.hessians(code);
  double hsum = 0.0;
  for (const Matrix& h : hd) hsum += h.frobenius_norm_sq();
  return (sigma1 * ce.value + std::sqrt(hsum)) / (sigmak * sigmak);
}

double theorem5_rhs(const DifferentiableMap& encoder, const DifferentiableMap& decoder,
                    const Vec& x) {
  return theorem5_rhs(encoder, decoder, x, default_scale_ladder(),
                      default_directions(encoder.in_dim()));
}

double curve_curvature(const Vec& first_derivative, const Vec& second_derivative) {
  const double speed = norm(first_derivative);
  if (speed == 0.0) throw std::invalid_argument("curve_curvature: zero speed");
  return wedge_norm(first_derivative, second_derivative) / (speed * speed * speed);
}

Matrix TangentBasis::as_matrix() const {
  Matrix m(static_cast<int>(at_point.size()), static_cast<int>(vectors.size()));
  for (size_t j = 0; j < vectors.size(); ++j) m.set_col(static_cast<int>(j), vectors[j]);
  return m;
}

Matrix TangentBasis::projector() const {
  const Matrix u = as_matrix();
  return u * u.transposed();
}

TangentBasis tangent_basis(const AutoencoderNet& net, const Vec& x, int k) {
  const int n = net.ambient_dim();
  const int d = net.code_dim();
  if (k < 1 || k > n) throw std::invalid_argument("tangent_basis: k out of range");
  const JacobianPair jp = input_jacobians(net, x);
  const SvdFactors f = d < n ? svd_of_product(jp.j_decoder, jp.j_encoder) : svd(jp.full());

  const double s1 = f.singular_values.front();
  if (s1 == 0.0 || f.singular_values[k - 1] <= 1e-10 * s1) {
    std::ostringstream os;
    os << "tangent_basis: rank below " << k << "; spectrum =";
    for (double s : f.singular_values) os << ' ' << format_double(s);
    throw std::runtime_error(os.str());
  }

  TangentBasis tb;
  tb.at_point = x;
  tb.vectors.reserve(k);
  for (int j = 0; j < k; ++j) tb.vectors.push_back(f.u.col(j));
  return tb;
}

}  // namespace rcae
