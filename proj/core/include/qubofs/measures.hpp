#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>

#include "qubofs/dataset.hpp"

namespace qubofs::measures {

/// Number of quantile bins used by the mutual-information estimator unless
/// a caller overrides it. Five equal-frequency bins reproduce the reference
/// results on the 569-row breast-cancer data; more bins inflate the plug-in
/// estimate at this sample size.
inline constexpr int kDefaultMiBins = 5;

enum class FeatureMeasure { correl, mi };
enum class TargetMeasure { correl, mi, roc, anova };

/// (rho_Feature, rho_Target) choice. Inter-feature dependence is restricted
/// to correlation and mutual information; ROC and ANOVA only make sense
/// against a binary target.
struct DependencyTuple {
  FeatureMeasure feature = FeatureMeasure::correl;
  TargetMeasure target = TargetMeasure::correl;

  friend bool operator==(const DependencyTuple&, const DependencyTuple&) = default;
};

std::string to_string(FeatureMeasure m);
std::string to_string(TargetMeasure m);
std::string to_string(const DependencyTuple& t);

/// Parses "Correl,ROC" / "MI,Anova" (case-insensitive, "ANOVA" accepted).
DependencyTuple parse_tuple(const std::string& text);

struct DependencyMatrices {
  Eigen::MatrixXd inter_feature;  // n x n, symmetric, zero diagonal, entries >= 0
  Eigen::VectorXd to_target;      // length n, entries >= 0
  DependencyTuple tuple;
};

/// Pearson correlation coefficient. Throws on constant input.
double pearson(std::span<const double> x, std::span<const double> y);

/// Plug-in mutual information in nats from a joint histogram. Continuous
/// inputs are discretized into equal-frequency bins; inputs with at most two
/// distinct values are used as categories directly.
double mutual_information(std::span<const double> x, std::span<const double> y,
                          int bins = kDefaultMiBins);

/// AUROC of x as a score for the binary labels y, midrank (Mann-Whitney)
/// formulation; ties contribute 1/2.
double univariate_roc(std::span<const double> x, std::span<const int> y);

/// One-way ANOVA F statistic of x grouped by the binary labels y,
/// df = (1, m-2). Throws when a group has < 2 members or the pooled
/// within-group variance vanishes.
double anova_f(std::span<const double> x, std::span<const int> y);

/// |measure| between every feature pair and between each feature and the
/// target. Absolute values everywhere; the diagonal is exactly zero.
DependencyMatrices build_matrices(const data::Dataset& dataset,
                                  const DependencyTuple& tuple,
                                  int bins = kDefaultMiBins);

}  // namespace qubofs::measures
