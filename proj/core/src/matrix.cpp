#include "rcae/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcae {

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
  v_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, Vec data) : rows_(rows), cols_(cols), v_(std::move(data)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
  if (v_.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("Matrix: data size " + std::to_string(v_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  for (double x : v_)
    if (!std::isfinite(x)) throw std::invalid_argument("Matrix: non-finite entry");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(const Vec& d) {
  Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

Matrix Matrix::column(const Vec& v) {
  Matrix m(static_cast<int>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
  return m;
}

Matrix Matrix::outer(const Vec& a, const Vec& b) {
  Matrix m(static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = a[i] * b[j];
  return m;
}

Vec Matrix::row(int i) const {
  Vec r(cols_);
  for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
  return r;
}

Vec Matrix::col(int j) const {
  Vec c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Matrix::set_col(int j, const Vec& v) {
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator+(const Matrix& o) const {
  Matrix r = *this;
  r += o;
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  Matrix r = *this;
  r -= o;
  return r;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix +=: shape mismatch");
  for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix -=: shape mismatch");
  for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_)
    throw std::invalid_argument("Matrix *: inner dimensions " + std::to_string(cols_) + " and " +
                                std::to_string(o.rows_) + " differ");
  Matrix r(rows_, o.cols_);
  // i-k-j order keeps both reads sequential in memory.
  for (int i = 0; i < rows_; ++i) {
    const double* arow = v_.data() + static_cast<size_t>(i) * cols_;
    double* rrow = r.v_.data() + static_cast<size_t>(i) * o.cols_;
    for (int k = 0; k < cols_; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = o.v_.data() + static_cast<size_t>(k) * o.cols_;
      for (int j = 0; j < o.cols_; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

Matrix Matrix::scaled(double c) const {
  Matrix r = *this;
  for (double& x : r.v_) x *= c;
  return r;
}

Vec Matrix::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("Matrix apply: length mismatch");
  Vec y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double* arow = v_.data() + static_cast<size_t>(i) * cols_;
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += arow[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec Matrix::apply_transposed(const Vec& x) const {
  if (static_cast<int>(x.size()) != rows_) throw std::invalid_argument("Matrix apply_transposed: length mismatch");
  Vec y(cols_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double* arow = v_.data() + static_cast<size_t>(i) * cols_;
    const double xi = x[i];
    for (int j = 0; j < cols_; ++j) y[j] += arow[j] * xi;
  }
  return y;
}

double Matrix::frobenius_norm_sq() const {
  double s = 0.0;
  for (double x : v_) s += x * x;
  return s;
}

double Matrix::frobenius_norm() const { return std::sqrt(frobenius_norm_sq()); }

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

bool Matrix::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

bool Matrix::operator==(const Matrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vec& a) { return dot(a, a); }
double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

Vec vec_add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec vec_scale(const Vec& a, double c) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

bool vec_all_finite(const Vec& a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace rcae
