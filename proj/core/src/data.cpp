#include "rcae/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "rcae/csv.hpp"
#include "rcae/rng.hpp"
#include "rcae/svd.hpp"

namespace rcae {

std::vector<int> Dataset::effective_train() const {
  if (!train_indices.empty() || !val_indices.empty() || !test_indices.empty()) return train_indices;
  std::vector<int> all(points.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

void Dataset::validate() const {
  const size_t n = points.size();
  for (const auto& p : points)
    if (p.size() != points.front().size()) throw std::invalid_argument("dataset: ragged points");
  if (!labels.empty() && labels.size() != n)
    throw std::invalid_argument("dataset: label count mismatch");
  std::set<int> seen;
  for (const auto* part : {&train_indices, &val_indices, &test_indices})
    for (int i : *part) {
      if (i < 0 || i >= static_cast<int>(n)) throw std::invalid_argument("dataset: split index out of range");
      if (!seen.insert(i).second) throw std::invalid_argument("dataset: split parts overlap");
    }
}

void StiefelSpec::validate() const {
  if (n1 <= 0 || n2 <= 0 || n2 >= n1)
    throw std::invalid_argument("StiefelSpec: requires 0 < n2 < n1");
  if (count <= 0) throw std::invalid_argument("StiefelSpec: count must be positive");
  if (delta < 0.0) throw std::invalid_argument("StiefelSpec: delta must be non-negative");
}

Vec flatten_column_major(const Matrix& m) {
  Vec v(static_cast<size_t>(m.rows()) * m.cols());
  size_t p = 0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) v[p++] = m(i, j);
  return v;
}

Matrix unflatten_column_major(const Vec& v, int n1, int n2) {
  if (static_cast<int>(v.size()) != n1 * n2)
    throw std::invalid_argument("unflatten: size mismatch");
  Matrix m(n1, n2);
  size_t p = 0;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) m(i, j) = v[p++];
  return m;
}

Matrix sample_stiefel_point(int n1, int n2, Rng& rng) {
  Matrix g(n1, n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) g(i, j) = rng.normal();
  QrFactors f = qr(g);
  // Absorb R's diagonal signs so the draw follows the invariant measure.
  for (int j = 0; j < n2; ++j)
    if (f.r(j, j) < 0.0)
      for (int i = 0; i < n1; ++i) f.q(i, j) = -f.q(i, j);
  return f.q;
}

StiefelSample sample_stiefel(const StiefelSpec& spec) {
  spec.validate();
  Rng point_rng = Rng(spec.seed).derive(1);
  Rng noise_rng = Rng(spec.seed).derive(2);

  StiefelSample s;
  s.clean.provenance = "stiefel(n1=" + std::to_string(spec.n1) + ",n2=" + std::to_string(spec.n2) +
                       ",N=" + std::to_string(spec.count) + ",delta=" + format_double(spec.delta) +
                       ",seed=" + std::to_string(spec.seed) + ") clean";
  s.noisy.provenance = s.clean.provenance + " + noise";
  s.clean.points.reserve(spec.count);
  s.noisy.points.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    const Vec z = flatten_column_major(sample_stiefel_point(spec.n1, spec.n2, point_rng));
    Vec x = z;
    for (double& v : x) v += noise_rng.normal(0.0, spec.delta);
    s.clean.points.push_back(z);
    s.noisy.points.push_back(std::move(x));
  }
  return s;
}

Dataset toy_halfplane(int count, uint64_t seed) {
  if (count <= 0) throw std::invalid_argument("toy_halfplane: count must be positive");
  Rng rng(seed);
  Dataset ds;
  ds.provenance = "toy-halfplane(N=" + std::to_string(count) + ",seed=" + std::to_string(seed) + ")";
  ds.points.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-1.0, 1.0);
    ds.points.push_back({x, x > 0.0 ? y : 0.0});
  }
  return ds;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  const Matrix m = read_matrix_csv(path, schema.skip_header);
  std::vector<int> feats = schema.feature_columns;
  if (feats.empty()) {
    for (int j = 0; j < m.cols(); ++j)
      if (!schema.label_column || *schema.label_column != j) feats.push_back(j);
  }
  for (int j : feats)
    if (j < 0 || j >= m.cols())
      throw std::runtime_error("load_csv: feature column " + std::to_string(j) + " out of range");
  if (schema.label_column && (*schema.label_column < 0 || *schema.label_column >= m.cols()))
    throw std::runtime_error("load_csv: label column out of range");

  Dataset ds;
  ds.provenance = "csv:" + path;
  ds.points.reserve(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    Vec p(feats.size());
    for (size_t j = 0; j < feats.size(); ++j) p[j] = m(i, feats[j]);
    ds.points.push_back(std::move(p));
    if (schema.label_column) {
      const double lv = m(i, *schema.label_column);
      const int li = static_cast<int>(std::lround(lv));
      if (std::abs(lv - li) > 1e-9)
        throw std::runtime_error("load_csv: non-integer label at row " + std::to_string(i + 1));
      ds.labels.push_back(li);
    }
  }
  ds.validate();
  return ds;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (int i = 0; i < ds.size(); ++i) {
    const Vec& p = ds.points[i];
    for (size_t j = 0; j < p.size(); ++j) {
      if (j) out << ',';
      out << format_double(p[j]);
    }
    if (ds.has_labels()) out << ',' << ds.labels[i];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset make_split(const Dataset& ds, const SplitFractions& f, uint64_t seed) {
  if (f.train < 0 || f.val < 0 || f.test < 0 || f.train + f.val + f.test > 1.0 + 1e-12)
    throw std::invalid_argument("make_split: fractions must be non-negative and sum to <= 1");
  const int n = ds.size();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i + 1)));
    std::swap(idx[i], idx[j]);
  }
  const int n_train = static_cast<int>(std::floor(f.train * n));
  const int n_val = static_cast<int>(std::floor(f.val * n));
  const int n_test = static_cast<int>(std::floor(f.test * n));

  Dataset out = ds;
  out.train_indices.assign(idx.begin(), idx.begin() + n_train);
  out.val_indices.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
  out.test_indices.assign(idx.begin() + n_train + n_val, idx.begin() + n_train + n_val + n_test);
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.val_indices.begin(), out.val_indices.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  out.validate();
  return out;
}

Dataset subset(const Dataset& ds, const std::vector<int>& indices) {
  Dataset out;
  out.provenance = ds.provenance + " (subset)";
  out.points.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= ds.size()) throw std::invalid_argument("subset: index out of range");
    out.points.push_back(ds.points[i]);
    if (ds.has_labels()) out.labels.push_back(ds.labels[i]);
  }
  return out;
}

}  // namespace rcae
