#include "qubofs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qubofs/rng.hpp"

namespace qubofs::data {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string file_stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

// Shortest decimal representation that parses back to the same double.
std::string format_roundtrip(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void check_invariants(const Dataset& d) {
  const int m = d.n_rows();
  if (m < 2) throw std::runtime_error("dataset has fewer than 2 usable rows");
  int ones = std::accumulate(d.target.begin(), d.target.end(), 0);
  if (ones == 0 || ones == m)
    throw std::runtime_error("target must contain both classes");
}

}  // namespace

Dataset load_csv(const std::string& path, const LoadOptions& options,
                 LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  int target_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == options.target_column) target_idx = static_cast<int>(i);
  if (target_idx < 0)
    throw std::runtime_error("target column '" + options.target_column +
                             "' not found in " + path);

  const int n_total = static_cast<int>(header.size());
  std::vector<std::vector<double>> rows;
  std::vector<int> target;
  int dropped = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != n_total)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(n_total) + " fields, got " +
                               std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(n_total - 1);
    bool missing = false;
    int t = -1;
    for (int i = 0; i < n_total; ++i) {
      double v;
      if (!parse_double(fields[i], v)) {
        if (fields[i].empty() || fields[i] == "NA" || fields[i] == "nan") {
          missing = true;
          break;
        }
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": cannot parse '" + fields[i] + "'");
      }
      if (i == target_idx) {
        if (v != 0.0 && v != 1.0) throw std::runtime_error("non-binary target");
        t = static_cast<int>(v);
      } else {
        row.push_back(v);
      }
    }
    if (missing) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(row));
    target.push_back(t);
  }
  if (report) report->rows_dropped_missing = dropped;

  const int m = static_cast<int>(rows.size());
  const int n = n_total - 1;
  if (m < 2) throw std::runtime_error("dataset has fewer than 2 usable rows");

  // Detect constant columns before assembling the matrix.
  std::vector<int> keep;
  for (int j = 0; j < n; ++j) {
    bool constant = true;
    for (int i = 1; i < m && constant; ++i)
      constant = rows[i][j] == rows[0][j];
    if (constant) {
      int orig = j < target_idx ? j : j + 1;
      if (!options.drop_constant)
        throw std::runtime_error("constant feature column '" + header[orig] + "'");
      if (report) report->constant_columns_dropped.push_back(header[orig]);
    } else {
      keep.push_back(j);
    }
  }
  if (keep.empty()) throw std::runtime_error("no usable feature columns");

  Dataset d;
  d.id = file_stem(path);
  d.features.resize(m, static_cast<int>(keep.size()));
  for (int i = 0; i < m; ++i)
    for (std::size_t jj = 0; jj < keep.size(); ++jj)
      d.features(i, static_cast<int>(jj)) = rows[i][keep[jj]];
  d.target = std::move(target);
  for (int j : keep) {
    int orig = j < target_idx ? j : j + 1;
    d.names.push_back(header[orig]);
  }
  check_invariants(d);
  return apply_scaling(d, options.scaling);
}

void write_csv(const Dataset& dataset, const std::string& path,
               const std::string& target_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& name : dataset.names) out << name << ',';
  out << target_column << '\n';
  for (int i = 0; i < dataset.n_rows(); ++i) {
    for (int j = 0; j < dataset.n_features(); ++j)
      out << format_roundtrip(dataset.features(i, j)) << ',';
    out << dataset.target[i] << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Dataset apply_scaling(const Dataset& dataset, Scaling scaling) {
  if (scaling == Scaling::none) return dataset;
  Dataset d = dataset;
  const int m = d.n_rows();
  for (int j = 0; j < d.n_features(); ++j) {
    auto col = d.features.col(j);
    if (scaling == Scaling::zscore) {
      const double mean = col.mean();
      const double var = (col.array() - mean).square().sum() / m;  // population variance
      if (var <= 0.0) throw std::runtime_error("zero-variance column during scaling");
      col = (col.array() - mean) / std::sqrt(var);
    } else {
      const double lo = col.minCoeff(), hi = col.maxCoeff();
      if (hi <= lo) throw std::runtime_error("zero-range column during scaling");
      col = (col.array() - lo) / (hi - lo);
    }
  }
  return d;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0))
    throw std::invalid_argument("split fraction must lie in (0,1)");
  const int m = dataset.n_rows();
  const int m1 = static_cast<int>(std::lround(spec.fraction * m));
  if (m1 < 2 || m - m1 < 2)
    throw std::runtime_error("split fraction leaves fewer than 2 rows in a part");

  auto rng = make_rng(spec.seed);
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);

  auto both_classes = [&](auto first, auto last) {
    bool has0 = false, has1 = false;
    for (auto it = first; it != last; ++it)
      (dataset.target[*it] ? has1 : has0) = true;
    return has0 && has1;
  };

  for (int attempt = 0; attempt < 100; ++attempt) {
    std::shuffle(idx.begin(), idx.end(), rng);
    if (both_classes(idx.begin(), idx.begin() + m1) &&
        both_classes(idx.begin() + m1, idx.end())) {
      auto take = [&](int from, int count) {
        Dataset part;
        part.id = dataset.id;
        part.names = dataset.names;
        part.features.resize(count, dataset.n_features());
        part.target.resize(count);
        std::vector<int> rows(idx.begin() + from, idx.begin() + from + count);
        std::sort(rows.begin(), rows.end());  // keep original row order within parts
        for (int i = 0; i < count; ++i) {
          part.features.row(i) = dataset.features.row(rows[i]);
          part.target[i] = dataset.target[rows[i]];
        }
        return part;
      };
      return {take(0, m1), take(m1, m - m1)};
    }
  }
  throw std::runtime_error("could not produce a split with both classes in each part");
}

Dataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.n_features < 1 || spec.n_rows < 4)
    throw std::invalid_argument("synthetic spec too small");
  auto rng = make_rng(spec.seed, 0x5711);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const int n = spec.n_features, m = spec.n_rows, k = std::max(1, spec.n_factors);

  // Sparse factor loadings give a moderate, banded correlation structure.
  Eigen::MatrixXd loadings = Eigen::MatrixXd::Zero(n, k);
  for (int j = 0; j < n; ++j) {
    loadings(j, j % k) = 0.6 + 0.3 * unif(rng);
    if (unif(rng) < 0.5) loadings(j, (j + 1) % k) = 0.4 * (unif(rng) - 0.5) * 2.0;
  }

  Eigen::MatrixXd factors(m, k);
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < k; ++c) factors(i, c) = normal(rng);

  Dataset d;
  d.id = "synthetic-" + std::to_string(n) + "x" + std::to_string(m) + "-s" +
         std::to_string(spec.seed);
  d.features.resize(m, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd col = factors * loadings.row(j).transpose();
    for (int i = 0; i < m; ++i) col(i) += 0.8 * normal(rng);
    d.features.col(j) = col;
  }

  // Planted logistic target on a random informative subset.
  const int n_info = std::max(1, static_cast<int>(std::lround(spec.informative_fraction * n)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < n_info; ++c)
    w(order[c]) = (0.5 + unif(rng)) * (unif(rng) < 0.5 ? -1.0 : 1.0);

  Eigen::VectorXd eta = d.features * w;
  // Shift the intercept until the expected positive rate is roughly met.
  std::vector<double> sorted(eta.data(), eta.data() + m);
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[static_cast<std::size_t>((1.0 - spec.positive_rate) * (m - 1))];
  d.target.resize(m);
  int ones = 0;
  for (int i = 0; i < m; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-(1.5 * (eta(i) - cut))));
    d.target[i] = unif(rng) < p ? 1 : 0;
    ones += d.target[i];
  }
  if (ones == 0) d.target[0] = 1;
  if (ones == m) d.target[0] = 0;

  for (int j = 0; j < n; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "f%02d", j);
    d.names.emplace_back(buf);
  }
  return d;
}

}  // namespace qubofs::data
