#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "qubofs/bitstring.hpp"
#include "qubofs/dataset.hpp"

namespace qubofs::mleval {

struct LogisticModel {
  Eigen::VectorXd weights;  // length k+1, intercept last
  BitString subset;         // over the original n features, popcount k
  bool capped = false;      // perfect-separation cap was applied
};

struct ModelScore {
  double auroc = 0.0;
  double accuracy = 0.0;
  int n_selected = 0;
};

struct FitOptions {
  int max_iter = 100;
  double tol = 1e-8;       // gradient max-norm convergence threshold
  double l2 = 0.0;         // ridge strength on the non-intercept weights
  double weight_cap = 30.0;  // norm cap against perfect-separation divergence
  bool allow_empty = false;  // empty subset -> intercept-only model

  // When set, receives the penalized log-likelihood after every IRLS step.
  std::vector<double>* loglik_trace = nullptr;
};

/// Penalized maximum-likelihood logistic regression on the selected columns,
/// fitted with iteratively reweighted least squares (step-halving keeps the
/// log-likelihood non-decreasing). l2 = 0 is the plain MLE.
LogisticModel fit_logistic(const data::Dataset& dataset, const BitString& subset,
                           const FitOptions& options = {});

Eigen::VectorXd predict_proba(const LogisticModel& model, const data::Dataset& dataset);

/// AUROC (midrank Mann-Whitney on the predicted probabilities) and accuracy
/// at the 0.5 threshold, both on the given dataset.
ModelScore score(const LogisticModel& model, const data::Dataset& dataset);

ModelScore fit_and_score(const data::Dataset& dataset, const BitString& subset,
                         const FitOptions& options = {});

/// Trains all 2^n - 1 non-empty subsets and returns the argmax-AUROC one.
/// Ties break toward fewer features, then lexicographically.
std::pair<BitString, ModelScore> brute_force_subset(const data::Dataset& dataset,
                                                    const FitOptions& options = {},
                                                    int max_n = 20, int threads = 1);

struct RfeStep {
  BitString subset;
  ModelScore score;
};

struct RfeResult {
  std::vector<RfeStep> path;  // popcounts n, n-1, ..., 1
  int best_index = 0;         // step with the best AUROC (ties: fewer features)
};

/// Recursive feature elimination: drop the feature with the smallest
/// |standardized coefficient| until one remains.
RfeResult rfe(const data::Dataset& dataset, const FitOptions& options = {});

struct LassoResult {
  BitString subset;
  ModelScore score;       // of the refit (unpenalized) model on the subset
  double alpha_best = 0.0;
  bool all_zero = false;  // every alpha produced the empty model
};

std::vector<double> default_alpha_grid();  // 30 log-spaced points in [1e-4, 1e1]

/// L1-penalized logistic regression over an alpha grid (proximal gradient),
/// alpha chosen by cross-validated mean AUROC, final model refit without
/// penalty on the surviving features.
LassoResult lasso_path(const data::Dataset& dataset,
                       std::span<const double> alphas, int cv_folds,
                       std::uint64_t seed, const FitOptions& refit = {});

/// Weights of the L1 fit at a single alpha (intercept last, not penalized).
/// Exposed for the alpha-limit checks.
Eigen::VectorXd lasso_weights(const data::Dataset& dataset, double alpha,
                              int max_iter = 2000, double tol = 1e-7);

}  // namespace qubofs::mleval
