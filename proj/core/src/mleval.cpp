#include "qubofs/mleval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "qubofs/measures.hpp"
#include "qubofs/rng.hpp"

namespace qubofs::mleval {
namespace {

Eigen::MatrixXd design_matrix(const data::Dataset& dataset, const BitString& subset) {
  const int m = dataset.n_rows();
  const int k = subset.popcount();
  Eigen::MatrixXd a(m, k + 1);
  int col = 0;
  for (std::size_t j = 0; j < subset.size(); ++j)
    if (subset.test(j)) a.col(col++) = dataset.features.col(static_cast<int>(j));
  a.col(k).setOnes();
  return a;
}

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

// sum_i [y_i eta_i - log(1 + e^{eta_i})], numerically stable.
double log_likelihood(const Eigen::VectorXd& eta, const std::vector<int>& y) {
  double acc = 0.0;
  for (int i = 0; i < eta.size(); ++i) {
    const double e = eta(i);
    acc += y[i] * e - (std::max(e, 0.0) + std::log1p(std::exp(-std::abs(e))));
  }
  return acc;
}

}  // namespace

LogisticModel fit_logistic(const data::Dataset& dataset, const BitString& subset,
                           const FitOptions& options) {
  if (static_cast<int>(subset.size()) != dataset.n_features())
    throw std::invalid_argument("subset length must equal the feature count");
  const int k = subset.popcount();
  if (k == 0 && !options.allow_empty)
    throw std::invalid_argument("empty subset (pass allow_empty for intercept-only)");

  const int m = dataset.n_rows();
  const Eigen::MatrixXd a = design_matrix(dataset, subset);
  const auto& y = dataset.target;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(k + 1);
  Eigen::VectorXd penalty_mask = Eigen::VectorXd::Ones(k + 1);
  penalty_mask(k) = 0.0;  // intercept free

  auto penalized_ll = [&](const Eigen::VectorXd& wv) {
    const Eigen::VectorXd eta = a * wv;
    return log_likelihood(eta, y) -
           0.5 * options.l2 * (penalty_mask.array() * wv.array().square()).sum();
  };

  LogisticModel model;
  model.subset = subset;
  double ll = penalized_ll(w);
  if (options.loglik_trace) options.loglik_trace->push_back(ll);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Eigen::VectorXd eta = a * w;
    Eigen::VectorXd p(m), irls_w(m);
    for (int i = 0; i < m; ++i) {
      p(i) = sigmoid(eta(i));
      irls_w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    Eigen::VectorXd resid(m);
    for (int i = 0; i < m; ++i) resid(i) = y[i] - p(i);
    Eigen::VectorXd grad =
        a.transpose() * resid - options.l2 * (penalty_mask.array() * w.array()).matrix();
    if (grad.lpNorm<Eigen::Infinity>() < options.tol) break;

    Eigen::MatrixXd hess = a.transpose() * irls_w.asDiagonal() * a;
    hess += options.l2 * penalty_mask.asDiagonal();
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) {  // singular normal equations: ridge jitter
      hess += 1e-8 * Eigen::MatrixXd::Identity(k + 1, k + 1);
      step = hess.ldlt().solve(grad);
    }

    // Step-halving keeps the (penalized) log-likelihood non-decreasing.
    double t = 1.0;
    Eigen::VectorXd w_next = w + step;
    double ll_next = penalized_ll(w_next);
    while (ll_next < ll && t > 1e-10) {
      t *= 0.5;
      w_next = w + t * step;
      ll_next = penalized_ll(w_next);
    }
    w = std::move(w_next);
    ll = ll_next;
    if (options.loglik_trace) options.loglik_trace->push_back(ll);

    if (options.l2 == 0.0 && w.norm() > options.weight_cap) {
      w *= options.weight_cap / w.norm();  // perfect separation: cap and stop
      model.capped = true;
      if (options.loglik_trace) options.loglik_trace->back() = penalized_ll(w);
      break;
    }
  }
  model.weights = std::move(w);
  return model;
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const data::Dataset& dataset) {
  const Eigen::MatrixXd a = design_matrix(dataset, model.subset);
  if (a.cols() != model.weights.size())
    throw std::invalid_argument("model/dataset dimension mismatch");
  Eigen::VectorXd eta = a * model.weights;
  for (int i = 0; i < eta.size(); ++i) eta(i) = sigmoid(eta(i));
  return eta;
}

ModelScore score(const LogisticModel& model, const data::Dataset& dataset) {
  const Eigen::VectorXd p = predict_proba(model, dataset);
  const std::vector<double> probs(p.data(), p.data() + p.size());
  ModelScore s;
  s.auroc = measures::univariate_roc(probs, dataset.target);
  int correct = 0;
  for (int i = 0; i < dataset.n_rows(); ++i)
    correct += (p(i) >= 0.5 ? 1 : 0) == dataset.target[i];
  s.accuracy = static_cast<double>(correct) / dataset.n_rows();
  s.n_selected = model.subset.popcount();
  return s;
}

ModelScore fit_and_score(const data::Dataset& dataset, const BitString& subset,
                         const FitOptions& options) {
  return score(fit_logistic(dataset, subset, options), dataset);
}

namespace {

// Subset ordering for the brute-force argmax: higher AUROC, then fewer
// features, then the lexicographically smaller string.
bool better_subset(const ModelScore& s, const BitString& z, const ModelScore& best_s,
                   const BitString& best_z) {
  if (s.auroc != best_s.auroc) return s.auroc > best_s.auroc;
  if (s.n_selected != best_s.n_selected) return s.n_selected < best_s.n_selected;
  return z < best_z;
}

}  // namespace

std::pair<BitString, ModelScore> brute_force_subset(const data::Dataset& dataset,
                                                    const FitOptions& options,
                                                    int max_n, int threads) {
  const int n = dataset.n_features();
  if (n > max_n)
    throw std::invalid_argument("brute force refused: " + std::to_string(n) +
                                " features exceed the limit of " + std::to_string(max_n));
  const std::uint64_t total = (std::uint64_t{1} << n) - 1;

  struct Best {
    BitString z;
    ModelScore s;
    bool valid = false;
  };
  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  std::vector<Best> block_best(static_cast<std::size_t>(n_workers));

  auto work = [&](int worker) {
    Best local;
    for (std::uint64_t mask = 1 + worker; mask <= total;
         mask += static_cast<std::uint64_t>(n_workers)) {
      const BitString z = BitString::from_mask(mask, n);
      const ModelScore s = fit_and_score(dataset, z, options);
      if (!local.valid || better_subset(s, z, local.s, local.z)) {
        local = {z, s, true};
      }
    }
    block_best[static_cast<std::size_t>(worker)] = std::move(local);
  };

  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  Best overall;  // deterministic merge in worker order
  for (const auto& b : block_best)
    if (b.valid && (!overall.valid || better_subset(b.s, b.z, overall.s, overall.z)))
      overall = b;
  return {overall.z, overall.s};
}

RfeResult rfe(const data::Dataset& dataset, const FitOptions& options) {
  const int n = dataset.n_features();
  if (n < 2) throw std::invalid_argument("RFE needs at least 2 features");

  // Importance is the coefficient at z-score scale, so inputs on any scale
  // are compared fairly.
  std::vector<double> col_sd(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto col = dataset.features.col(j);
    col_sd[j] = std::sqrt((col.array() - col.mean()).square().sum() / dataset.n_rows());
  }

  RfeResult result;
  BitString active(n);
  for (int j = 0; j < n; ++j) active.set(j, true);

  while (active.popcount() >= 1) {
    const LogisticModel model = fit_logistic(dataset, active, options);
    result.path.push_back({active, score(model, dataset)});
    if (active.popcount() == 1) break;

    int weight_idx = 0, drop = -1;
    double smallest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (!active.test(j)) continue;
      const double importance = std::abs(model.weights(weight_idx)) * col_sd[j];
      if (importance < smallest) {
        smallest = importance;
        drop = j;
      }
      ++weight_idx;
    }
    active.set(drop, false);
  }

  result.best_index = 0;
  for (std::size_t i = 1; i < result.path.size(); ++i) {
    const auto& cur = result.path[i].score;
    const auto& best = result.path[result.best_index].score;
    if (cur.auroc > best.auroc ||
        (cur.auroc == best.auroc && cur.n_selected < best.n_selected))
      result.best_index = static_cast<int>(i);
  }
  return result;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid(30);
  const double lo = std::log(1e-4), hi = std::log(1e1);
  for (int i = 0; i < 30; ++i) grid[i] = std::exp(lo + (hi - lo) * i / 29.0);
  return grid;
}

Eigen::VectorXd lasso_weights(const data::Dataset& dataset, double alpha,
                              int max_iter, double tol) {
  const int n = dataset.n_features();
  const int m = dataset.n_rows();
  BitString all(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) all.set(j, true);
  const Eigen::MatrixXd a = design_matrix(dataset, all);
  const auto& y = dataset.target;

  // FISTA on (1/m) sum log-loss + alpha * ||w_features||_1.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
  const double lipschitz = std::max(eig.eigenvalues().maxCoeff() / (4.0 * m), 1e-12);
  const double step = 1.0 / lipschitz;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd v = w;
  double momentum = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd eta = a * v;
    Eigen::VectorXd grad_src(m);
    for (int i = 0; i < m; ++i) grad_src(i) = sigmoid(eta(i)) - y[i];
    Eigen::VectorXd u = v - (step / m) * (a.transpose() * grad_src);

    Eigen::VectorXd w_next = u;
    const double threshold = step * alpha;
    for (int j = 0; j < n; ++j)
      w_next(j) = std::copysign(std::max(std::abs(u(j)) - threshold, 0.0), u(j));

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    v = w_next + ((momentum - 1.0) / t_next) * (w_next - w);
    const double change = (w_next - w).lpNorm<Eigen::Infinity>();
    w = std::move(w_next);
    momentum = t_next;
    if (change < tol) break;
  }
  return w;
}

namespace {

// Deterministic stratified k-fold: shuffle within class, deal round-robin.
std::vector<int> fold_assignment(const std::vector<int>& y, int folds,
                                 std::uint64_t seed) {
  auto rng = make_rng(seed, 0x4c4);
  std::vector<int> fold(y.size());
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<int> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) rows.push_back(static_cast<int>(i));
    if (static_cast<int>(rows.size()) < folds)
      throw std::invalid_argument("too few rows of a class for the fold count");
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t i = 0; i < rows.size(); ++i)
      fold[rows[i]] = static_cast<int>(i % folds);
  }
  return fold;
}

data::Dataset take_rows(const data::Dataset& d, const std::vector<int>& rows) {
  data::Dataset out;
  out.id = d.id;
  out.names = d.names;
  out.features.resize(static_cast<int>(rows.size()), d.n_features());
  out.target.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<int>(i)) = d.features.row(rows[i]);
    out.target[i] = d.target[rows[i]];
  }
  return out;
}

}  // namespace

LassoResult lasso_path(const data::Dataset& dataset, std::span<const double> alphas,
                       int cv_folds, std::uint64_t seed, const FitOptions& refit) {
  if (alphas.empty()) throw std::invalid_argument("empty alpha grid");
  if (cv_folds < 2) throw std::invalid_argument("need at least 2 folds");
  const int n = dataset.n_features();
  const auto fold = fold_assignment(dataset.target, cv_folds, seed);

  std::vector<double> mean_auroc(alphas.size(), 0.0);
  for (int f = 0; f < cv_folds; ++f) {
    std::vector<int> train_rows, val_rows;
    for (int i = 0; i < dataset.n_rows(); ++i)
      (fold[i] == f ? val_rows : train_rows).push_back(i);
    const data::Dataset train = take_rows(dataset, train_rows);
    const data::Dataset val = take_rows(dataset, val_rows);

    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      const Eigen::VectorXd w = lasso_weights(train, alphas[ai]);
      std::vector<double> probs(val_rows.size());
      for (int i = 0; i < val.n_rows(); ++i) {
        double eta = w(n);
        for (int j = 0; j < n; ++j) eta += w(j) * val.features(i, j);
        probs[i] = sigmoid(eta);
      }
      mean_auroc[ai] += measures::univariate_roc(probs, val.target) / cv_folds;
    }
  }

  std::size_t best_alpha = 0;
  for (std::size_t ai = 1; ai < alphas.size(); ++ai)
    if (mean_auroc[ai] > mean_auroc[best_alpha] ||
        (mean_auroc[ai] == mean_auroc[best_alpha] && alphas[ai] > alphas[best_alpha]))
      best_alpha = ai;  // ties favor the sparser (larger alpha) solution

  LassoResult result;
  result.alpha_best = alphas[best_alpha];
  const Eigen::VectorXd w = lasso_weights(dataset, result.alpha_best);
  result.subset = BitString(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) result.subset.set(j, w(j) != 0.0);

  if (result.subset.popcount() == 0) {
    result.all_zero = true;
    FitOptions opts = refit;
    opts.allow_empty = true;
    result.score = fit_and_score(dataset, result.subset, opts);
  } else {
    result.score = fit_and_score(dataset, result.subset, refit);
  }
  return result;
}

}  // namespace qubofs::mleval
