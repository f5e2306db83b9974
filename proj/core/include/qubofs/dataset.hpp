#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qubofs::data {

enum class Scaling { none, zscore, minmax };

/// Immutable tabular dataset: real feature matrix plus a binary target.
/// Construction goes through load_csv / make_synthetic, both of which
/// enforce the invariants (both classes present, no constant columns,
/// no missing values).
struct Dataset {
  Eigen::MatrixXd features;        // m rows x n columns
  std::vector<int> target;         // length m, entries in {0,1}
  std::vector<std::string> names;  // n column labels
  std::string id;                  // provenance label (file stem or generator tag)

  int n_rows() const { return static_cast<int>(features.rows()); }
  int n_features() const { return static_cast<int>(features.cols()); }
};

struct LoadOptions {
  std::string target_column;
  Scaling scaling = Scaling::none;
  bool drop_constant = false;  // false: constant column is an error
};

struct LoadReport {
  int rows_dropped_missing = 0;
  std::vector<std::string> constant_columns_dropped;
};

Dataset load_csv(const std::string& path, const LoadOptions& options,
                 LoadReport* report = nullptr);

/// Writes header + rows; doubles use the shortest representation that
/// round-trips, so load(write(d)) == d bitwise.
void write_csv(const Dataset& dataset, const std::string& path,
               const std::string& target_column = "target");

/// Returns a scaled copy. zscore: zero mean, unit population variance.
/// minmax: affine map of each column onto [0,1].
Dataset apply_scaling(const Dataset& dataset, Scaling scaling);

struct SplitSpec {
  double fraction = 0.5;  // fraction of rows in the first part
  std::uint64_t seed = 0;
};

/// Random row partition. Both parts must contain both classes; the draw is
/// repeated up to 100 times before giving up.
std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec);

struct SyntheticSpec {
  int n_features = 8;
  int n_rows = 1000;
  std::uint64_t seed = 1;
  int n_factors = 4;              // latent Gaussian factors driving inter-feature correlation
  double informative_fraction = 0.4;  // share of features with planted target dependence
  double positive_rate = 0.3;     // approximate class balance of the target
};

/// Deterministic stand-in for the credit datasets the original study used:
/// correlated Gaussian features with a planted logistic target.
Dataset make_synthetic(const SyntheticSpec& spec);

}  // namespace qubofs::data
