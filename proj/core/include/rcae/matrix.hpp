#pragma once

#include <cstddef>
#include <vector>

namespace rcae {

using Vec = std::vector<double>;

/// Dense real matrix, row-major. The universal carrier for Jacobians,
/// weight blocks and SVD factors. Entries are always 64-bit doubles.
class Matrix {
 public:
  Matrix() = default;

  /// rows x cols, zero-initialized.
  Matrix(int rows, int cols);

  /// rows x cols from row-major data. Throws std::invalid_argument if the
  /// size does not match or any entry is non-finite.
  Matrix(int rows, int cols, Vec data);

  static Matrix identity(int n);
  static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }
  static Matrix diag(const Vec& d);
  /// Column vector (n x 1) view of a Vec.
  static Matrix column(const Vec& v);
  /// Outer product a b^T.
  static Matrix outer(const Vec& a, const Vec& b);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * cols_ + j]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  const Vec& raw() const { return v_; }

  Vec row(int i) const;
  Vec col(int j) const;
  void set_col(int j, const Vec& v);

  Matrix transposed() const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;  // matrix product
  Matrix scaled(double c) const;
  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);

  /// A * x for a length-cols vector.
  Vec apply(const Vec& x) const;
  /// A^T * x for a length-rows vector.
  Vec apply_transposed(const Vec& x) const;

  double frobenius_norm_sq() const;
  double frobenius_norm() const;
  /// Largest absolute entry (max norm).
  double max_abs() const;
  bool all_finite() const;

  /// true when dimensions match and entries are identical bit-for-bit.
  bool operator==(const Matrix& o) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  Vec v_;
};

// Small vector helpers shared across modules.
double dot(const Vec& a, const Vec& b);
double norm_sq(const Vec& a);
double norm(const Vec& a);
Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scale(const Vec& a, double c);
bool vec_all_finite(const Vec& a);

}  // namespace rcae
