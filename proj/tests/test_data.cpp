#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <set>

#include "rcae/csv.hpp"
#include "rcae/data.hpp"
#include "rcae/rng.hpp"

using namespace rcae;

TEST_SUITE("data") {

TEST_CASE("St(2,1) samples are unit vectors in the plane") {
  StiefelSpec spec{2, 1, 50, 0.0, 3};
  const StiefelSample s = sample_stiefel(spec);
  for (const Vec& p : s.clean.points) {
    CHECK(p.size() == 2);
    CHECK(norm(p) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("delta zero means noisy equals clean") {
  StiefelSpec spec{4, 2, 20, 0.0, 4};
  const StiefelSample s = sample_stiefel(spec);
  for (int i = 0; i < 20; ++i) CHECK(s.clean.points[i] == s.noisy.points[i]);
}

TEST_CASE("every clean sample is orthonormal to 1e-10") {
  StiefelSpec spec{5, 3, 100, 0.1, 5};
  const StiefelSample s = sample_stiefel(spec);
  for (const Vec& p : s.clean.points) {
    const Matrix x = unflatten_column_major(p, 5, 3);
    const Matrix g = x.transposed() * x;
    CHECK((g - Matrix::identity(3)).max_abs() < 1e-10);
  }
}

TEST_CASE("uniform law: X^T X is the identity and E[X X^T] = (n2/n1) I") {
  StiefelSpec spec{4, 2, 10000, 0.0, 6};
  const StiefelSample s = sample_stiefel(spec);
  Matrix mean_outer(4, 4);
  Matrix mean_gram(2, 2);
  for (const Vec& p : s.clean.points) {
    const Matrix x = unflatten_column_major(p, 4, 2);
    mean_outer += x * x.transposed();
    mean_gram += x.transposed() * x;
  }
  mean_outer = mean_outer.scaled(1.0 / spec.count);
  mean_gram = mean_gram.scaled(1.0 / spec.count);
  CHECK((mean_gram - Matrix::identity(2)).max_abs() < 1e-10);  // exact per sample

  // Invariance of the uniform law: E[X X^T] = (n2 / n1) I. Each entry is a
  // mean of bounded samples; 3 sigma / sqrt(N) with per-entry sd <= 0.5.
  const double band = 3.0 * 0.5 / std::sqrt(static_cast<double>(spec.count));
  const Matrix expect = Matrix::identity(4).scaled(2.0 / 4.0);
  CHECK((mean_outer - expect).max_abs() < band);
}

TEST_CASE("stiefel sampling is seed-deterministic") {
  StiefelSpec spec{4, 2, 10, 0.05, 7};
  const StiefelSample a = sample_stiefel(spec);
  const StiefelSample b = sample_stiefel(spec);
  for (int i = 0; i < 10; ++i) {
    CHECK(a.clean.points[i] == b.clean.points[i]);
    CHECK(a.noisy.points[i] == b.noisy.points[i]);
  }
}

TEST_CASE("reshape round-trips column-major") {
  Rng rng(8);
  const Vec v = rng.uniform_vec(12, -1, 1);
  CHECK(flatten_column_major(unflatten_column_major(v, 4, 3)) == v);
  Matrix m(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = rng.uniform(-1, 1);
  const Vec f = flatten_column_major(m);
  CHECK(f[0] == m(0, 0));
  CHECK(f[1] == m(1, 0));  // column-major order
  CHECK((unflatten_column_major(f, 4, 3) - m).max_abs() == 0.0);
}

TEST_CASE("toy dataset lies in the square with an exact zero branch") {
  const Dataset ds = toy_halfplane(5000, 9);
  int zero_branch = 0;
  for (const Vec& p : ds.points) {
    CHECK(p.size() == 2);
    CHECK(std::abs(p[0]) <= 1.0);
    CHECK(std::abs(p[1]) <= 1.0);
    if (p[0] <= 0.0) {
      CHECK(p[1] == 0.0);
      ++zero_branch;
    }
  }
  // Iverson split: half the points land on the segment, 3 sigma band.
  const double frac = static_cast<double>(zero_branch) / ds.size();
  CHECK(std::abs(frac - 0.5) < 3.0 * 0.5 / std::sqrt(5000.0));
}

TEST_CASE("toy dataset: the best x-axis projection has error about 1/6") {
  const Dataset ds = toy_halfplane(20000, 10);
  double mean = 0.0, m2 = 0.0;
  int n = 0;
  for (const Vec& p : ds.points) {
    const double sample = p[1] * p[1];
    ++n;
    const double d = sample - mean;
    mean += d / n;
    m2 += d * (sample - mean);
  }
  const double se = std::sqrt(m2 / (n - 1)) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - 1.0 / 6.0) < 3.0 * se);
}

TEST_CASE("csv fixtures round-trip") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "rcae_data_test.csv").string();
  {
    std::ofstream out(path);
    out << "0.25,1,3.5\n-1.5,2.25,0\n0,0,9.125\n";
  }
  const Dataset ds = load_csv(path, {});
  REQUIRE(ds.size() == 3);
  CHECK(ds.points[0] == Vec{0.25, 1.0, 3.5});
  CHECK(ds.points[1] == Vec{-1.5, 2.25, 0.0});
  CHECK(ds.points[2] == Vec{0.0, 0.0, 9.125});

  CsvSchema with_header;
  with_header.skip_header = true;
  {
    std::ofstream out(path);
    out << "a,b,c\n1,2,3\n";
  }
  const Dataset h = load_csv(path, with_header);
  CHECK(h.size() == 1);
  CHECK(h.points[0] == Vec{1.0, 2.0, 3.0});
}

TEST_CASE("labeled csv loads features and labels") {
  const auto path = (std::filesystem::temp_directory_path() / "rcae_labeled.csv").string();
  {
    std::ofstream out(path);
    out << "0.5,1.5,0\n0.25,-0.5,1\n";
  }
  CsvSchema schema;
  schema.label_column = 2;
  const Dataset ds = load_csv(path, schema);
  CHECK(ds.points[0] == Vec{0.5, 1.5});
  CHECK(ds.labels == std::vector<int>{0, 1});
}

TEST_CASE("generated stiefel data round-trips through csv") {
  StiefelSpec spec{4, 2, 25, 0.05, 11};
  const StiefelSample s = sample_stiefel(spec);
  const auto path = (std::filesystem::temp_directory_path() / "rcae_stiefel.csv").string();
  save_dataset_csv(s.noisy, path);
  const Dataset back = load_csv(path, {});
  REQUIRE(back.size() == 25);
  for (int i = 0; i < 25; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(back.points[i][j] == s.noisy.points[i][j]);  // 17 digits: exact
}

TEST_CASE("make_split obeys fractions, seeds, and disjointness") {
  Dataset ds;
  for (int i = 0; i < 100; ++i) ds.points.push_back({static_cast<double>(i)});

  SUBCASE("all train") {
    const Dataset s = make_split(ds, {1.0, 0.0, 0.0}, 5);
    CHECK(s.train_indices.size() == 100);
    CHECK(s.val_indices.empty());
    CHECK(s.test_indices.empty());
  }
  SUBCASE("80/10/10") {
    const Dataset s = make_split(ds, {0.8, 0.1, 0.1}, 5);
    CHECK(s.train_indices.size() == 80);
    CHECK(s.val_indices.size() == 10);
    CHECK(s.test_indices.size() == 10);
    std::set<int> all;
    for (const auto* part : {&s.train_indices, &s.val_indices, &s.test_indices})
      for (int i : *part) CHECK(all.insert(i).second);
  }
  SUBCASE("identical seeds give identical splits") {
    const Dataset a = make_split(ds, {0.7, 0.1, 0.2}, 6);
    const Dataset b = make_split(ds, {0.7, 0.1, 0.2}, 6);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);
  }
  SUBCASE("invalid fractions are rejected") {
    CHECK_THROWS_AS(make_split(ds, {0.9, 0.2, 0.0}, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_split(ds, {-0.1, 0.0, 0.0}, 5), std::invalid_argument);
  }
}

TEST_CASE("spec validation") {
  const StiefelSpec square{2, 2, 10, 0.1, 1};
  CHECK_THROWS_AS(square.validate(), std::invalid_argument);
  const StiefelSpec empty{3, 1, 0, 0.1, 1};
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
  CHECK_THROWS_AS(toy_halfplane(0, 1), std::invalid_argument);
  const StiefelSpec ok{5, 2, 10, 0.1, 1};
  CHECK(ok.manifold_dim() == 10 - 3);
}

}  // TEST_SUITE
