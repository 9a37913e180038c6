#include "rcae/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rcae {

Matrix SvdFactors::reconstruct() const { return truncated(static_cast<int>(singular_values.size())); }

Matrix SvdFactors::truncated(int k) const {
  Matrix out(u.rows(), vt.cols());
  for (int t = 0; t < k; ++t) {
    const double s = singular_values[t];
    if (s == 0.0) continue;
    for (int i = 0; i < u.rows(); ++i) {
      const double us = u(i, t) * s;
      for (int j = 0; j < vt.cols(); ++j) out(i, j) += us * vt(t, j);
    }
  }
  return out;
}

namespace {

constexpr int kMaxSweeps = 100;

// Gram-Schmidt completion: fill columns [from, total) of u with an
// orthonormal extension of its first `from` columns.
void complete_orthonormal(Matrix& u, int from) {
  const int m = u.rows();
  const int total = u.cols();
  int next = from;
  for (int cand = 0; cand < m && next < total; ++cand) {
    Vec v(m, 0.0);
    v[cand] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < next; ++j) {
        double d = 0.0;
        for (int i = 0; i < m; ++i) d += u(i, j) * v[i];
        for (int i = 0; i < m; ++i) v[i] -= d * u(i, j);
      }
    }
    const double nv = norm(v);
    if (nv > 0.5) {  // candidate not already (nearly) in the span
      for (int i = 0; i < m; ++i) u(i, next) = v[i] / nv;
      ++next;
    }
  }
  if (next < total) throw std::runtime_error("svd: failed to complete orthonormal basis");
}

// Deterministic sign fix: first entry of each left singular vector whose
// magnitude exceeds a tiny floor is made non-negative; the matching right
// vector is flipped with it.
void fix_signs(Matrix& u, Matrix& v) {
  for (int j = 0; j < u.cols(); ++j) {
    double lead = 0.0;
    for (int i = 0; i < u.rows(); ++i) {
      if (u(i, j) != 0.0) {
        lead = u(i, j);
        break;
      }
    }
    if (lead < 0.0) {
      for (int i = 0; i < u.rows(); ++i) u(i, j) = -u(i, j);
      if (j < v.cols())
        for (int i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
    }
  }
}

// One-sided Jacobi on a tall (m >= n) matrix. Returns u (m x n),
// singular values (n), v (n x n).
void jacobi_tall(const Matrix& a, Matrix& u, Vec& sigma, Matrix& v) {
  const int m = a.rows();
  const int n = a.cols();
  Matrix b = a;
  v = Matrix::identity(n);

  const double scale = a.frobenius_norm();
  const double rel_tol = 1e-12;

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          const double bp = b(i, p), bq = b(i, q);
          app += bp * bp;
          aqq += bq * bq;
          apq += bp * bq;
        }
        if (apq == 0.0) continue;
        const double denom = std::sqrt(app * aqq);
        if (denom == 0.0 || std::abs(apq) <= rel_tol * denom) continue;

        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double bp = b(i, p), bq = b(i, q);
          b(i, p) = c * bp - s * bq;
          b(i, q) = s * bp + c * bq;
        }
        for (int i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
        rotated = true;
      }
    }
    if (!rotated) break;
  }
  if (sweep == kMaxSweeps)
    throw std::runtime_error("svd: one-sided Jacobi did not converge after " +
                             std::to_string(kMaxSweeps) + " sweeps");

  sigma.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s2 = 0.0;
    for (int i = 0; i < m; ++i) s2 += b(i, j) * b(i, j);
    sigma[j] = std::sqrt(s2);
  }

  // Sort non-increasing, permuting b and v columns alongside.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return sigma[x] > sigma[y]; });

  Matrix bs(m, n), vs(n, n);
  Vec ss(n);
  for (int j = 0; j < n; ++j) {
    const int src = order[j];
    ss[j] = sigma[src];
    for (int i = 0; i < m; ++i) bs(i, j) = b(i, src);
    for (int i = 0; i < n; ++i) vs(i, j) = v(i, src);
  }
  sigma = ss;
  v = vs;

  // Normalize nonzero columns into u; complete the rest orthonormally.
  u = Matrix(m, n);
  const double zero_tol = (scale > 0.0 ? scale : 1.0) * 1e-300;
  int nonzero = 0;
  for (int j = 0; j < n; ++j) {
    if (sigma[j] > zero_tol) {
      for (int i = 0; i < m; ++i) u(i, j) = bs(i, j) / sigma[j];
      nonzero = j + 1;
    } else {
      sigma[j] = 0.0;
    }
  }
  if (nonzero < n) complete_orthonormal(u, nonzero);
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  if (!a.all_finite()) throw std::invalid_argument("svd: non-finite input");

  SvdFactors f;
  if (a.rows() >= a.cols()) {
    Matrix u, v;
    Vec s;
    jacobi_tall(a, u, s, v);
    fix_signs(u, v);
    f.u = std::move(u);
    f.singular_values = std::move(s);
    f.vt = v.transposed();
  } else {
    // A = (V') S (U')^T where A^T = U' S V'^T.
    Matrix u, v;
    Vec s;
    jacobi_tall(a.transposed(), u, s, v);
    fix_signs(v, u);  // v becomes the left factor of A
    f.u = std::move(v);
    f.singular_values = std::move(s);
    f.vt = u.transposed();
  }
  return f;
}

double kyfan_antinorm_sq(const Matrix& a, int k) {
  const int r = std::min(a.rows(), a.cols());
  if (k < 0 || k > r)
    throw std::invalid_argument("kyfan_antinorm_sq: k = " + std::to_string(k) +
                                " out of range [0, " + std::to_string(r) + "]");
  if (k == r) return 0.0;
  const SvdFactors f = svd(a);
  double s = 0.0;
  for (int i = r - 1; i >= k; --i) s += f.singular_values[i] * f.singular_values[i];
  return s;
}

Matrix truncate_rank(const Matrix& a, int k) {
  const int r = std::min(a.rows(), a.cols());
  if (k < 0 || k > r)
    throw std::invalid_argument("truncate_rank: k = " + std::to_string(k) + " out of range [0, " +
                                std::to_string(r) + "]");
  if (k == 0) return Matrix(a.rows(), a.cols());
  return svd(a).truncated(k);
}

QrFactors qr(const Matrix& a) {
  const int m = a.rows();
  const int n = a.cols();
  if (m < n) throw std::invalid_argument("qr: requires rows >= cols");

  Matrix work = a;
  std::vector<Vec> reflectors;
  reflectors.reserve(n);

  for (int j = 0; j < n; ++j) {
    Vec h(m, 0.0);
    double nx = 0.0;
    for (int i = j; i < m; ++i) nx += work(i, j) * work(i, j);
    nx = std::sqrt(nx);
    if (nx == 0.0) {
      reflectors.push_back(std::move(h));  // zero reflector: identity step
      continue;
    }
    const double alpha = work(j, j) >= 0.0 ? -nx : nx;
    h[j] = work(j, j) - alpha;
    for (int i = j + 1; i < m; ++i) h[i] = work(i, j);
    const double hn = norm(h);
    if (hn > 0.0)
      for (double& x : h) x /= hn;
    // Apply I - 2 h h^T to the remaining columns.
    for (int c = j; c < n; ++c) {
      double d = 0.0;
      for (int i = j; i < m; ++i) d += h[i] * work(i, c);
      d *= 2.0;
      for (int i = j; i < m; ++i) work(i, c) -= d * h[i];
    }
    reflectors.push_back(std::move(h));
  }

  QrFactors f;
  f.r = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) f.r(i, j) = work(i, j);

  // Accumulate thin Q by applying reflectors to the first n identity columns.
  f.q = Matrix(m, n);
  for (int j = 0; j < n; ++j) f.q(j, j) = 1.0;
  for (int t = n - 1; t >= 0; --t) {
    const Vec& h = reflectors[t];
    if (norm_sq(h) == 0.0) continue;
    for (int c = 0; c < n; ++c) {
      double d = 0.0;
      for (int i = 0; i < m; ++i) d += h[i] * f.q(i, c);
      d *= 2.0;
      for (int i = 0; i < m; ++i) f.q(i, c) -= d * h[i];
    }
  }
  return f;
}

SvdFactors svd_of_product(const Matrix& jd, const Matrix& je) {
  if (jd.cols() != je.rows())
    throw std::invalid_argument("svd_of_product: jd cols " + std::to_string(jd.cols()) +
                                " != je rows " + std::to_string(je.rows()));
  if (jd.rows() != je.cols())
    throw std::invalid_argument("svd_of_product: product is not square");
  const int n = jd.rows();
  const int d = jd.cols();
  if (d > n) throw std::invalid_argument("svd_of_product: requires d <= n");

  const QrFactors qd = qr(jd);                 // jd = Q1 R1
  const QrFactors qe = qr(je.transposed());    // je^T = Q2 R2, so je = R2^T Q2^T
  const Matrix core = qd.r * qe.r.transposed();  // d x d
  const SvdFactors cf = svd(core);

  SvdFactors f;
  f.u = Matrix(n, n);
  Matrix v(n, n);
  const Matrix u_thin = qd.q * cf.u;                  // n x d
  const Matrix v_thin = qe.q * cf.vt.transposed();    // n x d
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      f.u(i, j) = u_thin(i, j);
      v(i, j) = v_thin(i, j);
    }
  complete_orthonormal(f.u, d);
  complete_orthonormal(v, d);

  f.singular_values.assign(n, 0.0);
  for (int i = 0; i < d; ++i) f.singular_values[i] = cf.singular_values[i];

  fix_signs(f.u, v);
  f.vt = v.transposed();
  return f;
}

double wedge_norm(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("wedge_norm: length mismatch");
  const double g = norm_sq(a) * norm_sq(b) - dot(a, b) * dot(a, b);
  return std::sqrt(std::max(0.0, g));
}

}  // namespace rcae
