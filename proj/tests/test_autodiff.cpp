#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <functional>

#include "rcae/autodiff.hpp"
#include "rcae/rng.hpp"

using namespace rcae;
using rcae::ad::Tape;

namespace {

// Central-FD check of d(scalar)/d(leaf) for a scalar graph built from one
// parameter matrix.
double fd_check(const Matrix& leaf, const std::function<ad::NodeId(Tape&, ad::NodeId)>& build) {
  Tape tape;
  const ad::NodeId p = tape.param(leaf);
  const ad::NodeId loss = build(tape, p);
  tape.backward(loss);
  const Matrix g = tape.grad_or_zero(p);

  constexpr double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < leaf.rows(); ++i)
    for (int j = 0; j < leaf.cols(); ++j) {
      auto value_at = [&](double v) {
        Matrix m = leaf;
        m(i, j) = v;
        Tape t;
        return t.scalar(build(t, t.param(m)));
      };
      const double fd = (value_at(leaf(i, j) + h) - value_at(leaf(i, j) - h)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g(i, j)) / std::max({1.0, std::abs(fd), std::abs(g(i, j))}));
    }
  return worst;
}

Matrix rand_mat(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.5, 1.5);
  return m;
}

}  // namespace

TEST_SUITE("autodiff") {

TEST_CASE("forward values") {
  Tape tape;
  const auto a = tape.constant(Matrix(2, 2, {1, 2, 3, 4}));
  const auto b = tape.constant(Matrix(2, 2, {0, 1, 1, 0}));
  CHECK(tape.value(tape.matmul(a, b))(0, 0) == 2);
  CHECK(tape.scalar(tape.frob_sq(a)) == doctest::Approx(30.0));
  CHECK(tape.scalar(tape.dot(a, b)) == doctest::Approx(5.0));
  const auto v = tape.constant(Matrix(3, 1, {0.0, 1.0, -1.0}));
  CHECK(tape.scalar(tape.logsumexp(v)) ==
        doctest::Approx(std::log(1.0 + std::exp(1.0) + std::exp(-1.0))));
  CHECK(tape.scalar(tape.entry(v, 2)) == -1.0);
}

TEST_CASE("gradients of each op agree with finite differences") {
  Rng rng(31);
  const Matrix w = rand_mat(3, 4, rng);
  const Matrix x = rand_mat(4, 2, rng);
  const Matrix s = rand_mat(3, 1, rng);

  SUBCASE("matmul, left and right") {
    CHECK(fd_check(w, [&](Tape& t, ad::NodeId p) {
            return t.frob_sq(t.matmul(p, t.constant(x)));
          }) < 1e-8);
    CHECK(fd_check(x, [&](Tape& t, ad::NodeId p) {
            return t.frob_sq(t.matmul(t.constant(w), p));
          }) < 1e-8);
  }
  SUBCASE("tanh and one_minus_square chains") {
    CHECK(fd_check(w, [&](Tape& t, ad::NodeId p) { return t.frob_sq(t.tanh_of(p)); }) < 1e-8);
    CHECK(fd_check(w, [&](Tape& t, ad::NodeId p) {
            return t.frob_sq(t.one_minus_square(t.tanh_of(p)));
          }) < 1e-8);
  }
  SUBCASE("scale_rows, both inputs") {
    CHECK(fd_check(w, [&](Tape& t, ad::NodeId p) {
            return t.frob_sq(t.scale_rows(p, t.constant(s)));
          }) < 1e-8);
    CHECK(fd_check(s, [&](Tape& t, ad::NodeId p) {
            return t.frob_sq(t.scale_rows(t.constant(w), p));
          }) < 1e-8);
  }
  SUBCASE("dot, div, add, sub, scale") {
    const Matrix fixed = rand_mat(3, 4, rng);
    CHECK(fd_check(w, [&](Tape& t, ad::NodeId p) {
            const auto c = t.constant(fixed);
            const auto num = t.dot(p, c);
            const auto den = t.frob_sq(t.add(p, c));
            return t.div(num, den);
          }) < 1e-7);
    CHECK(fd_check(w, [&](Tape& t, ad::NodeId p) {
            return t.frob_sq(t.sub(t.scale(p, 2.5), t.constant(w)));
          }) < 1e-8);
  }
  SUBCASE("logsumexp and entry") {
    CHECK(fd_check(s, [&](Tape& t, ad::NodeId p) {
            return t.sub(t.logsumexp(p), t.entry(p, 1));
          }) < 1e-8);
  }
}

TEST_CASE("gradient accumulates over shared subexpressions") {
  // f(p) = ||p||^2 + dot(p, p) has gradient 4p.
  Rng rng(32);
  const Matrix p0 = rand_mat(2, 3, rng);
  Tape tape;
  const auto p = tape.param(p0);
  const auto loss = tape.add(tape.frob_sq(p), tape.dot(p, p));
  tape.backward(loss);
  const Matrix g = tape.grad(p);
  CHECK((g - p0.scaled(4.0)).max_abs() < 1e-12);
}

TEST_CASE("constants receive no gradient and params unreachable stay zero") {
  Tape tape;
  const auto a = tape.param(Matrix(2, 2, {1, 2, 3, 4}));
  const auto b = tape.param(Matrix(2, 2, {5, 6, 7, 8}));
  const auto loss = tape.frob_sq(a);
  tape.backward(loss);
  CHECK(tape.grad_or_zero(b).max_abs() == 0.0);
  CHECK(tape.grad(a).max_abs() > 0.0);
}

TEST_CASE("backward can run only once") {
  Tape tape;
  const auto a = tape.param(Matrix(1, 1, {2.0}));
  const auto loss = tape.frob_sq(a);
  tape.backward(loss);
  CHECK_THROWS_AS(tape.backward(loss), std::runtime_error);
}

}  // TEST_SUITE
