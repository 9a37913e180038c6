#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rcae/csv.hpp"
#include "rcae/rng.hpp"

using namespace rcae;

namespace {

std::filesystem::path tmp_file(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_SUITE("rng-csv") {

TEST_CASE("rng streams are deterministic and seed-dependent") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) differs |= (a2.uniform() != c.uniform());
  CHECK(differs);
}

TEST_CASE("derived streams do not depend on parent consumption") {
  Rng a(7);
  Rng d1 = a.derive(3);
  a.normal_vec(50);
  Rng d2 = a.derive(3);
  for (int i = 0; i < 20; ++i) CHECK(d1.uniform() == d2.uniform());
}

TEST_CASE("normal draws have sane moments") {
  Rng rng(9);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("uniform_int is in range and covers values") {
  Rng rng(10);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) ++counts[rng.uniform_int(7)];
  for (int c : counts) CHECK(c > 700);
}

TEST_CASE("sample_without_replacement yields distinct sorted indices") {
  Rng rng(11);
  const auto s = rng.sample_without_replacement(50, 20);
  CHECK(s.size() == 20);
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
  CHECK(s.front() >= 0);
  CHECK(s.back() < 50);
}

TEST_CASE("matrix csv round-trip is exact") {
  Rng rng(12);
  Matrix m(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = rng.normal() * std::pow(10.0, (i - 1) * 5);
  const auto path = tmp_file("rcae_matrix_test.csv");
  write_matrix_csv(m, path.string());
  const Matrix r = read_matrix_csv(path.string());
  CHECK(r == m);  // 17 significant digits round-trips doubles exactly
}

TEST_CASE("csv errors carry the line number") {
  const auto path = tmp_file("rcae_bad.csv");
  {
    std::ofstream out(path);
    out << "1,2,3\n# comment line\n4,5\n";
  }
  CHECK_THROWS_WITH_AS(read_matrix_csv(path.string()), doctest::Contains("line 3"),
                       std::runtime_error);
  {
    std::ofstream out(path);
    out << "1,2\n3,oops\n";
  }
  CHECK_THROWS_WITH_AS(read_matrix_csv(path.string()), doctest::Contains("line 2"),
                       std::runtime_error);
  CHECK_THROWS_AS(read_matrix_csv("/nonexistent/file.csv"), std::runtime_error);
}

TEST_CASE("format_double survives round trip") {
  for (double x : {1.0 / 3.0, 1e-300, 12345.6789e100, -0.1}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

}  // TEST_SUITE
