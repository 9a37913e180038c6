#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcae/matrix.hpp"

namespace rcae {

/// Ordered collection of points in R^n with optional labels and a
/// train/val/test split over (a subset of) the indices.
struct Dataset {
  std::vector<Vec> points;
  std::vector<int> labels;  // empty when unlabeled; else one id per point
  std::vector<int> train_indices;
  std::vector<int> val_indices;
  std::vector<int> test_indices;
  std::string provenance;

  int size() const { return static_cast<int>(points.size()); }
  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  bool has_labels() const { return !labels.empty(); }

  /// All indices as the train split when no split has been assigned.
  std::vector<int> effective_train() const;

  void validate() const;
};

/// Stiefel manifold sampling spec: n1 x n2 matrices with orthonormal
/// columns, embedded in R^{n1*n2}, plus isotropic Gaussian noise.
struct StiefelSpec {
  int n1;
  int n2;
  int count;     // N
  double delta;  // noise std-dev
  uint64_t seed;

  int ambient_dim() const { return n1 * n2; }
  int manifold_dim() const { return n1 * n2 - n2 * (n2 + 1) / 2; }
  void validate() const;
};

/// Column-major reshape between an n1 x n2 matrix and a length n1*n2 vector.
Vec flatten_column_major(const Matrix& m);
Matrix unflatten_column_major(const Vec& v, int n1, int n2);

/// Uniform draw on St(n1, n2): QR of a standard Gaussian matrix with the
/// R-diagonal signs absorbed into Q (invariant Haar measure).
Matrix sample_stiefel_point(int n1, int n2, class Rng& rng);

struct StiefelSample {
  Dataset clean;
  Dataset noisy;
};
StiefelSample sample_stiefel(const StiefelSpec& spec);

/// The two-part toy dataset: (x, y*[x > 0]) with x, y independent uniform on
/// [-1, 1]. Points with x <= 0 lie exactly on the segment y = 0.
Dataset toy_halfplane(int count, uint64_t seed);

struct CsvSchema {
  std::vector<int> feature_columns;  // empty = all columns (minus label)
  std::optional<int> label_column;
  bool skip_header = false;
};
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Feature CSV (plus trailing label column when labeled), 17 significant
/// digits.
void save_dataset_csv(const Dataset& ds, const std::string& path);

struct SplitFractions {
  double train;
  double val;
  double test;
};
/// Seeded disjoint split; each part receives floor(fraction * N) indices.
Dataset make_split(const Dataset& ds, const SplitFractions& fractions, uint64_t seed);

/// View with only the selected points (labels follow; split cleared).
Dataset subset(const Dataset& ds, const std::vector<int>& indices);

}  // namespace rcae
