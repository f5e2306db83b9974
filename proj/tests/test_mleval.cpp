#include <cmath>

#include "doctest.h"
#include "qubofs/mleval.hpp"
#include "qubofs/rng.hpp"

using namespace qubofs;
using namespace qubofs::mleval;

namespace {

BitString all_ones(int n) {
  BitString z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z.set(i, true);
  return z;
}

// Logistic data with known weights, for the generate-and-refit check.
data::Dataset planted_logistic(int n, int m, const Eigen::VectorXd& w_true,
                               double intercept, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x90);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  data::Dataset d;
  d.id = "planted";
  d.features.resize(m, n);
  d.target.resize(m);
  for (int j = 0; j < n; ++j) d.names.push_back("x" + std::to_string(j));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) d.features(i, j) = g(rng);
    const double eta = d.features.row(i).dot(w_true) + intercept;
    d.target[i] = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
  }
  return d;
}

data::Dataset wdbc() {
  static const data::Dataset d = data::load_csv(
      std::string(QUBOFS_TEST_DATA_DIR) + "/wdbc10.csv", {.target_column = "diagnosis"});
  return d;
}

}  // namespace

TEST_CASE("perfectly separating feature trains to full accuracy, capped") {
  data::Dataset d;
  d.features.resize(8, 1);
  // Narrow margin: the unpenalized MLE diverges, so the norm cap must fire.
  d.features << -0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4;
  d.target = {0, 0, 0, 0, 1, 1, 1, 1};
  d.names = {"x"};
  const auto model = fit_logistic(d, BitString::parse("1"));
  CHECK(model.capped);
  const auto s = score(model, d);
  CHECK(s.accuracy == 1.0);
  CHECK(s.auroc == 1.0);
}

TEST_CASE("intercept-only model on a balanced target predicts one half") {
  data::Dataset d;
  d.features.resize(6, 1);
  d.features << 1, 2, 3, 4, 5, 6;
  d.target = {0, 1, 0, 1, 0, 1};
  d.names = {"x"};
  CHECK_THROWS(fit_logistic(d, BitString::parse("0")));  // needs the flag
  FitOptions options;
  options.allow_empty = true;
  const auto model = fit_logistic(d, BitString::parse("0"), options);
  const auto p = predict_proba(model, d);
  for (int i = 0; i < 6; ++i) CHECK(p(i) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("irls recovers planted weights on a large sample") {
  Eigen::VectorXd w_true(3);
  w_true << 1.2, -0.7, 0.4;
  const auto d = planted_logistic(3, 5000, w_true, 0.3, 1);
  const auto model = fit_logistic(d, all_ones(3));
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(model.weights(j) - w_true(j)) < 0.1);
  CHECK(std::abs(model.weights(3) - 0.3) < 0.1);
}

TEST_CASE("irls log-likelihood is non-decreasing across iterations") {
  Eigen::VectorXd w_true(4);
  w_true << 0.8, -1.1, 0.0, 0.5;
  const auto d = planted_logistic(4, 400, w_true, -0.2, 2);
  std::vector<double> loglik;
  FitOptions options;
  options.loglik_trace = &loglik;
  fit_logistic(d, all_ones(4), options);
  REQUIRE(loglik.size() >= 2);
  for (std::size_t i = 1; i < loglik.size(); ++i)
    CHECK(loglik[i] >= loglik[i - 1] - 1e-9);
}

TEST_CASE("score endpoints: oracle probabilities and random scores") {
  // A model whose predictions coincide with the labels scores perfectly.
  data::Dataset d;
  const int m = 400;
  d.features.resize(m, 1);
  d.target.resize(m);
  auto rng = make_rng(3);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < m; ++i) {
    d.target[i] = coin(rng);
    d.features(i, 0) = d.target[i] ? 40.0 : -40.0;  // saturates the sigmoid
  }
  d.names = {"x"};
  const auto model = fit_logistic(d, BitString::parse("1"));
  const auto s = score(model, d);
  CHECK(s.auroc == 1.0);
  CHECK(s.accuracy == 1.0);

  // Uninformative feature: AUROC near 1/2.
  data::Dataset noise;
  noise.features.resize(m, 1);
  noise.target.resize(m);
  std::normal_distribution<double> g;
  for (int i = 0; i < m; ++i) {
    noise.features(i, 0) = g(rng);
    noise.target[i] = coin(rng);
  }
  noise.names = {"x"};
  const auto s2 = fit_and_score(noise, BitString::parse("1"));
  CHECK(std::abs(s2.auroc - 0.5) < 0.08);
}

TEST_CASE("wdbc all-feature scores match the reference study") {
  const auto d = data::apply_scaling(wdbc(), data::Scaling::minmax);
  FitOptions options;
  options.l2 = 1.0;
  const auto s = fit_and_score(d, all_ones(10), options);
  CHECK(s.auroc == doctest::Approx(0.9844).epsilon(5e-4));
  CHECK(s.accuracy == doctest::Approx(0.9297).epsilon(1e-3));
}

TEST_CASE("brute force: single feature, planted signals, guard") {
  // n = 1: the only subset is the selected one.
  data::Dataset one;
  one.features.resize(20, 1);
  one.target.resize(20);
  auto rng = make_rng(4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    one.target[i] = i % 2;
    one.features(i, 0) = g(rng) + one.target[i];
  }
  one.names = {"x"};
  const auto [z1, s1] = brute_force_subset(one);
  CHECK(z1 == BitString::parse("1"));

  // One informative feature among three: the winner must contain it.
  data::Dataset three;
  const int m = 300;
  three.features.resize(m, 3);
  three.target.resize(m);
  for (int i = 0; i < m; ++i) {
    three.target[i] = i % 2;
    three.features(i, 0) = g(rng);
    three.features(i, 1) = g(rng) + 2.0 * three.target[i];
    three.features(i, 2) = g(rng);
  }
  three.names = {"a", "b", "c"};
  const auto [z3, s3] = brute_force_subset(three);
  CHECK(z3.test(1));

  CHECK_THROWS(brute_force_subset(wdbc(), {}, 8));  // 10 features > limit 8
}

TEST_CASE("brute force is deterministic under threading") {
  Eigen::VectorXd w_true(6);
  w_true << 1.0, 0.0, -0.8, 0.0, 0.5, 0.0;
  const auto d = planted_logistic(6, 200, w_true, 0.0, 7);
  const auto sequential = brute_force_subset(d, {}, 20, 1);
  const auto threaded = brute_force_subset(d, {}, 20, 4);
  CHECK(sequential.first == threaded.first);
  CHECK(sequential.second.auroc == threaded.second.auroc);
}

TEST_CASE("rfe eliminates one feature per step and spots planted noise") {
  Eigen::VectorXd w_true(2);
  w_true << 1.5, 0.0;  // feature 1 is pure noise
  int noise_first = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = planted_logistic(2, 250, w_true, 0.0, 1000 + seed);
    const auto result = rfe(d);
    REQUIRE(result.path.size() == 2);
    CHECK(result.path[0].score.n_selected == 2);
    CHECK(result.path[1].score.n_selected == 1);
    noise_first += result.path[1].subset.test(0);  // signal survived to the end
  }
  CHECK(noise_first >= 95);
}

TEST_CASE("rfe path has strictly decreasing popcounts") {
  const auto d = wdbc();
  const auto result = rfe(d, FitOptions{.l2 = 1.0});
  REQUIRE(result.path.size() == 10);
  for (std::size_t i = 0; i < result.path.size(); ++i)
    CHECK(result.path[i].score.n_selected == 10 - static_cast<int>(i));
  CHECK(result.best_index >= 0);
}

TEST_CASE("lasso limits: huge alpha kills everything, alpha zero is the MLE") {
  Eigen::VectorXd w_true(4);
  w_true << 1.0, -0.6, 0.0, 0.3;
  const auto d = planted_logistic(4, 600, w_true, 0.1, 9);

  const auto dead = lasso_weights(d, 1e4);
  for (int j = 0; j < 4; ++j) CHECK(dead(j) == 0.0);

  const auto free = lasso_weights(d, 0.0, 20000, 1e-9);
  const auto mle = fit_logistic(d, all_ones(4));
  for (int j = 0; j < 5; ++j)
    CHECK(std::abs(free(j) - mle.weights(j)) < 1e-4);
}

TEST_CASE("lasso with cross-validation recovers a planted 2-of-8 support") {
  Eigen::VectorXd w_true = Eigen::VectorXd::Zero(8);
  w_true(2) = 1.8;
  w_true(5) = -1.6;
  int both = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = planted_logistic(8, 500, w_true, 0.0, 2000 + seed);
    const auto grid = default_alpha_grid();
    const auto result = lasso_path(d, grid, 5, seed);
    both += result.subset.test(2) && result.subset.test(5);
  }
  CHECK(both >= 18);
}

TEST_CASE("lasso reports the all-zero outcome instead of failing") {
  Eigen::VectorXd w_true = Eigen::VectorXd::Zero(3);
  const auto d = planted_logistic(3, 200, w_true, 0.0, 5);
  const std::vector<double> harsh{1e3, 1e4};
  const auto result = lasso_path(d, harsh, 3, 1);
  CHECK(result.all_zero);
  CHECK(result.subset.popcount() == 0);
}

TEST_CASE("selection baselines never beat the brute-force optimum") {
  Eigen::VectorXd w_true(6);
  w_true << 1.2, 0.0, -0.9, 0.4, 0.0, 0.6;
  const auto d = planted_logistic(6, 300, w_true, 0.0, 12);
  const auto [best_z, best_s] = brute_force_subset(d);
  const auto rfe_result = rfe(d);
  CHECK(rfe_result.path[rfe_result.best_index].score.auroc <= best_s.auroc + 1e-12);
  const auto lasso = lasso_path(d, default_alpha_grid(), 5, 3);
  CHECK(lasso.score.auroc <= best_s.auroc + 1e-12);
}
