#include "qubofs/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace qubofs::measures {
namespace {

void require_equal_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("vectors must have equal length");
}

// Quantile with linear interpolation (the convention numpy calls "linear").
double quantile(std::vector<double> sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - lo;
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Category labels for the MI histogram: vectors with <= 2 distinct values
// keep their values as categories, everything else is cut at equal-frequency
// quantile edges.
std::pair<std::vector<int>, int> categorize(std::span<const double> x, int bins) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  for (double v : sorted)
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);

  std::vector<int> cats(x.size());
  if (distinct.size() <= 2) {
    for (std::size_t i = 0; i < x.size(); ++i)
      cats[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), x[i]) -
                                 distinct.begin());
    return {cats, static_cast<int>(distinct.size())};
  }
  std::vector<double> edges;
  edges.reserve(bins - 1);
  for (int k = 1; k < bins; ++k) edges.push_back(quantile(sorted, double(k) / bins));
  for (std::size_t i = 0; i < x.size(); ++i)
    cats[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x[i]) -
                               edges.begin());
  return {cats, bins};
}

std::vector<double> column(const Eigen::MatrixXd& m, int j) {
  return {m.col(j).data(), m.col(j).data() + m.rows()};
}

}  // namespace

std::string to_string(FeatureMeasure m) {
  return m == FeatureMeasure::correl ? "Correl" : "MI";
}

std::string to_string(TargetMeasure m) {
  switch (m) {
    case TargetMeasure::correl: return "Correl";
    case TargetMeasure::mi: return "MI";
    case TargetMeasure::roc: return "ROC";
    case TargetMeasure::anova: return "Anova";
  }
  return "?";
}

std::string to_string(const DependencyTuple& t) {
  return to_string(t.feature) + "," + to_string(t.target);
}

DependencyTuple parse_tuple(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("tuple must look like 'Correl,ROC'");
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    return s;
  };
  const std::string f = lower(text.substr(0, comma));
  const std::string t = lower(text.substr(comma + 1));
  DependencyTuple out;
  if (f == "correl") out.feature = FeatureMeasure::correl;
  else if (f == "mi") out.feature = FeatureMeasure::mi;
  else throw std::invalid_argument("feature measure must be Correl or MI, got '" + f + "'");
  if (t == "correl") out.target = TargetMeasure::correl;
  else if (t == "mi") out.target = TargetMeasure::mi;
  else if (t == "roc") out.target = TargetMeasure::roc;
  else if (t == "anova") out.target = TargetMeasure::anova;
  else throw std::invalid_argument("unknown target measure '" + t + "'");
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_equal_length(x.size(), y.size());
  const std::size_t m = x.size();
  if (m < 2) throw std::invalid_argument("need at least 2 observations");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double mutual_information(std::span<const double> x, std::span<const double> y,
                          int bins) {
  require_equal_length(x.size(), y.size());
  if (bins < 2) throw std::invalid_argument("bins must be >= 2");
  const auto [cx, nx] = categorize(x, bins);
  const auto [cy, ny] = categorize(y, bins);
  const std::size_t m = x.size();

  std::vector<double> joint(static_cast<std::size_t>(nx) * ny, 0.0);
  for (std::size_t i = 0; i < m; ++i) joint[cx[i] * ny + cy[i]] += 1.0;
  for (double& v : joint) v /= static_cast<double>(m);

  std::vector<double> px(nx, 0.0), py(ny, 0.0);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) {
      px[a] += joint[a * ny + b];
      py[b] += joint[a * ny + b];
    }
  double mi = 0.0;
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) {
      const double p = joint[a * ny + b];
      if (p > 0.0) mi += p * std::log(p / (px[a] * py[b]));
    }
  return std::max(mi, 0.0);
}

double univariate_roc(std::span<const double> x, std::span<const int> y) {
  require_equal_length(x.size(), y.size());
  const std::size_t m = x.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::size_t n1 = 0;
  for (int t : y) n1 += (t == 1);
  const std::size_t n0 = m - n1;
  if (n0 == 0 || n1 == 0) throw std::invalid_argument("single-class labels");

  // Midranks over tie groups, then the Mann-Whitney statistic.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && x[order[j + 1]] == x[order[i]]) ++j;
    const double midrank = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (y[order[k]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  return (rank_sum_pos - 0.5 * n1 * (n1 + 1)) / (static_cast<double>(n0) * n1);
}

double anova_f(std::span<const double> x, std::span<const int> y) {
  require_equal_length(x.size(), y.size());
  const std::size_t m = x.size();
  double sum[2] = {0, 0};
  std::size_t cnt[2] = {0, 0};
  for (std::size_t i = 0; i < m; ++i) {
    sum[y[i]] += x[i];
    ++cnt[y[i]];
  }
  if (cnt[0] < 2 || cnt[1] < 2)
    throw std::invalid_argument("each class needs at least 2 members");
  const double mean0 = sum[0] / cnt[0], mean1 = sum[1] / cnt[1];
  const double grand = (sum[0] + sum[1]) / m;
  double ssw = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = x[i] - (y[i] ? mean1 : mean0);
    ssw += d * d;
  }
  if (ssw <= 0.0) throw std::invalid_argument("degenerate groups");
  const double ssb = cnt[0] * (mean0 - grand) * (mean0 - grand) +
                     cnt[1] * (mean1 - grand) * (mean1 - grand);
  return ssb / (ssw / static_cast<double>(m - 2));
}

DependencyMatrices build_matrices(const data::Dataset& dataset,
                                  const DependencyTuple& tuple, int bins) {
  const int n = dataset.n_features();
  const int m = dataset.n_rows();
  DependencyMatrices out;
  out.tuple = tuple;
  out.inter_feature = Eigen::MatrixXd::Zero(n, n);
  out.to_target = Eigen::VectorXd::Zero(n);

  std::vector<std::vector<double>> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = column(dataset.features, j);
  std::vector<double> target_real(m);
  for (int i = 0; i < m; ++i) target_real[i] = dataset.target[i];

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = tuple.feature == FeatureMeasure::correl
                           ? std::abs(pearson(cols[i], cols[j]))
                           : mutual_information(cols[i], cols[j], bins);
      out.inter_feature(i, j) = v;
      out.inter_feature(j, i) = v;
    }

  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    switch (tuple.target) {
      case TargetMeasure::correl:
        v = std::abs(pearson(cols[i], target_real));
        break;
      case TargetMeasure::mi:
        v = mutual_information(cols[i], target_real, bins);
        break;
      case TargetMeasure::roc:
        v = univariate_roc(cols[i], dataset.target);
        break;
      case TargetMeasure::anova:
        v = anova_f(cols[i], dataset.target);
        break;
    }
    out.to_target(i) = std::abs(v);
  }
  return out;
}

}  // namespace qubofs::measures
