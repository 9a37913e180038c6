#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rcae/matrix.hpp"
#include "rcae/rng.hpp"
#include "rcae/svd.hpp"

using namespace rcae;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng, double scale = 2.0) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

Matrix random_orthogonal(int n, Rng& rng) {
  return qr(random_matrix(n, n, rng)).q;
}

void check_factors(const Matrix& a, const SvdFactors& f) {
  const int r = static_cast<int>(f.singular_values.size());
  REQUIRE(r == std::min(a.rows(), a.cols()));
  for (int i = 1; i < r; ++i) CHECK(f.singular_values[i - 1] >= f.singular_values[i]);
  for (double s : f.singular_values) CHECK(s >= 0.0);

  const Matrix utu = f.u.transposed() * f.u;
  const Matrix vvt = f.vt * f.vt.transposed();
  CHECK((utu - Matrix::identity(r)).max_abs() < 1e-10);
  CHECK((vvt - Matrix::identity(r)).max_abs() < 1e-10);
  CHECK((f.reconstruct() - a).frobenius_norm() <= 1e-8 * std::max(1.0, a.frobenius_norm()));
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("matrix basics") {
  Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(a(1, 2) == 6);
  CHECK(a.transposed()(2, 1) == 6);
  CHECK(a.frobenius_norm_sq() == doctest::Approx(91.0));
  CHECK_THROWS_AS(Matrix(2, 2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Matrix(1, 1, {std::nan("")}), std::invalid_argument);

  const Matrix id = Matrix::identity(3);
  CHECK((id * a.transposed() - a.transposed()).max_abs() == 0.0);
  CHECK_THROWS_AS(a * a, std::invalid_argument);
}

TEST_CASE("svd of a diagonal matrix") {
  const Matrix a = Matrix::diag({3, 2, 1});
  const SvdFactors f = svd(a);
  CHECK(f.singular_values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.singular_values[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.singular_values[2] == doctest::Approx(1.0).epsilon(1e-12));
  check_factors(a, f);
}

TEST_CASE("svd of the zero matrix") {
  const Matrix a(4, 3);
  const SvdFactors f = svd(a);
  for (double s : f.singular_values) CHECK(s == 0.0);
  check_factors(a, f);
}

TEST_CASE("svd reconstructs seeded matrices, both orientations") {
  Rng rng(101);
  for (const auto [rows, cols] : {std::pair{8, 8}, std::pair{9, 4}, std::pair{4, 9}}) {
    const Matrix a = random_matrix(rows, cols, rng);
    check_factors(a, svd(a));
  }
}

TEST_CASE("svd factors are deterministic") {
  Rng rng(77);
  const Matrix a = random_matrix(6, 5, rng);
  const SvdFactors f1 = svd(a);
  const SvdFactors f2 = svd(a);
  CHECK(f1.u == f2.u);
  CHECK(f1.vt == f2.vt);
  CHECK(f1.singular_values == f2.singular_values);
  // Sign convention: first nonzero entry of each left singular vector >= 0.
  for (int j = 0; j < f1.u.cols(); ++j) {
    for (int i = 0; i < f1.u.rows(); ++i) {
      if (f1.u(i, j) != 0.0) {
        CHECK(f1.u(i, j) > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("svd of rank-deficient matrices keeps orthonormal factors") {
  Rng rng(55);
  const Matrix u = random_matrix(6, 2, rng);
  const Matrix v = random_matrix(2, 6, rng);
  const Matrix a = u * v;  // rank <= 2
  const SvdFactors f = svd(a);
  check_factors(a, f);
  CHECK(f.singular_values[2] < 1e-12 * f.singular_values[0]);
}

TEST_CASE("kyfan antinorm on a diagonal matrix") {
  const Matrix a = Matrix::diag({3, 2, 1});
  CHECK(kyfan_antinorm_sq(a, 1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(kyfan_antinorm_sq(a, 0) == doctest::Approx(14.0).epsilon(1e-12));
  CHECK(kyfan_antinorm_sq(a, 3) == 0.0);
  CHECK_THROWS_AS(kyfan_antinorm_sq(a, 4), std::invalid_argument);
  CHECK_THROWS_AS(kyfan_antinorm_sq(a, -1), std::invalid_argument);
}

TEST_CASE("kyfan equals the best rank-k residual (Eckart-Young oracle)") {
  Rng rng(202);
  const Matrix a = random_matrix(6, 6, rng);
  const double lhs = kyfan_antinorm_sq(a, 2);
  const double rhs = (a - truncate_rank(a, 2)).frobenius_norm_sq();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("kyfan is zero iff rank <= k") {
  Rng rng(203);
  const Matrix u = random_matrix(5, 2, rng);
  const Matrix v = random_matrix(2, 5, rng);
  const Matrix a = u * v;
  CHECK(kyfan_antinorm_sq(a, 2) < 1e-20 * a.frobenius_norm_sq());
  CHECK(kyfan_antinorm_sq(a, 1) > 1e-6);
}

TEST_CASE("truncate_rank examples") {
  const Matrix a = Matrix::diag({3, 2, 1});
  const Matrix t2 = truncate_rank(a, 2);
  CHECK((t2 - Matrix::diag({3, 2, 0})).max_abs() < 1e-12);

  Rng rng(204);
  Vec u = rng.uniform_vec(4, -1, 1), v = rng.uniform_vec(4, -1, 1);
  const Matrix outer = Matrix::outer(u, v);
  CHECK((truncate_rank(outer, 1) - outer).max_abs() < 1e-10);

  const Matrix b = random_matrix(5, 7, rng);
  const double resid = (b - truncate_rank(b, 3)).frobenius_norm_sq();
  CHECK(resid == doctest::Approx(kyfan_antinorm_sq(b, 3)).epsilon(1e-9));

  CHECK(truncate_rank(b, 0).max_abs() == 0.0);
}

TEST_CASE("eckart-young identity across random dims and every k") {
  Rng rng(205);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 1 + static_cast<int>(rng.uniform_int(8));
    const int cols = 1 + static_cast<int>(rng.uniform_int(8));
    const Matrix a = random_matrix(rows, cols, rng);
    const double tol = 1e-9 * (1.0 + a.frobenius_norm_sq());
    double prev = -1.0;
    for (int k = 0; k <= std::min(rows, cols); ++k) {
      const double anti = kyfan_antinorm_sq(a, k);
      const double resid = (a - truncate_rank(a, k)).frobenius_norm_sq();
      CHECK(std::abs(anti - resid) < tol);
      if (k > 0) CHECK(anti <= prev + tol);  // non-increasing in k
      prev = anti;
    }
  }
}

TEST_CASE("singular values are orthogonally invariant") {
  Rng rng(206);
  const Matrix a = random_matrix(6, 4, rng);
  const Matrix q = random_orthogonal(6, rng);
  const Matrix p = random_orthogonal(4, rng);
  const Vec sa = svd(a).singular_values;
  const Vec sqap = svd(q * a * p).singular_values;
  for (size_t i = 0; i < sa.size(); ++i)
    CHECK(sa[i] == doctest::Approx(sqap[i]).epsilon(1e-9));
}

TEST_CASE("svd_of_product matches the direct product svd") {
  SUBCASE("identity times padded diagonal") {
    const Matrix jd = Matrix::identity(3);
    Matrix je(3, 3);
    je(0, 0) = 2.0;
    je(1, 1) = 1.0;
    const SvdFactors f = svd_of_product(jd, je);
    CHECK(f.singular_values[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.singular_values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.singular_values[2] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("random seeded 10x3 times 3x10") {
    Rng rng(207);
    const Matrix jd = random_matrix(10, 3, rng);
    const Matrix je = random_matrix(3, 10, rng);
    const SvdFactors fast = svd_of_product(jd, je);
    const SvdFactors direct = svd(jd * je);
    for (int i = 0; i < 10; ++i) {
      const double ref = direct.singular_values[i];
      CHECK(std::abs(fast.singular_values[i] - ref) <=
            1e-9 * std::max(1.0, direct.singular_values[0]));
    }
    CHECK((fast.reconstruct() - jd * je).frobenius_norm() <
          1e-8 * std::max(1.0, (jd * je).frobenius_norm()));
    // Factor invariants hold for the padded square factorization too.
    const Matrix utu = fast.u.transposed() * fast.u;
    CHECK((utu - Matrix::identity(10)).max_abs() < 1e-10);
  }
  SUBCASE("zero columns in jd cap the product rank") {
    Rng rng(208);
    Matrix jd = random_matrix(5, 3, rng);
    for (int i = 0; i < 5; ++i) jd(i, 2) = 0.0;  // rank(jd) <= 2
    const Matrix je = random_matrix(3, 5, rng);
    const SvdFactors f = svd_of_product(jd, je);
    CHECK(f.singular_values[2] < 1e-10 * std::max(1.0, f.singular_values[0]));
  }
  SUBCASE("dimension mismatch is a domain error") {
    CHECK_THROWS_AS(svd_of_product(Matrix(3, 2), Matrix(3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(svd_of_product(Matrix(2, 3), Matrix(3, 2)), std::invalid_argument);
  }
}

TEST_CASE("svd_of_product agrees with direct svd on many seeded instances") {
  Rng rng(209);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_int(6));
    const int d = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(n)));
    const Matrix jd = random_matrix(n, d, rng);
    const Matrix je = random_matrix(d, n, rng);
    const Vec fast = svd_of_product(jd, je).singular_values;
    const Vec direct = svd(jd * je).singular_values;
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(fast[i] - direct[i]) <= 1e-9 * std::max(1.0, direct[0]));
  }
}

TEST_CASE("wedge norm") {
  CHECK(wedge_norm({1, 0, 0}, {0, 1, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  const Vec a{0.3, -1.2, 2.0};
  CHECK(wedge_norm(a, vec_scale(a, 2.0)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(wedge_norm({1, 2}, {1, 2, 3}), std::invalid_argument);

  // Brute-force expansion oracle: ||a ^ b||^2 = sum_{i<j} (a_i b_j - a_j b_i)^2.
  Rng rng(210);
  const Vec u = rng.uniform_vec(7, -2, 2);
  const Vec v = rng.uniform_vec(7, -2, 2);
  double expansion = 0.0;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j) {
      const double t = u[i] * v[j] - u[j] * v[i];
      expansion += t * t;
    }
  CHECK(wedge_norm(u, v) == doctest::Approx(std::sqrt(expansion)).epsilon(1e-12));
}

TEST_CASE("householder qr") {
  Rng rng(211);
  const Matrix a = random_matrix(7, 4, rng);
  const QrFactors f = qr(a);
  CHECK((f.q.transposed() * f.q - Matrix::identity(4)).max_abs() < 1e-12);
  CHECK((f.q * f.r - a).max_abs() < 1e-12);
  for (int i = 1; i < 4; ++i)
    for (int j = 0; j < i; ++j) CHECK(f.r(i, j) == 0.0);
}

}  // TEST_SUITE
