#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "qubofs/quantum.hpp"
#include "qubofs/rng.hpp"

using namespace qubofs;
using namespace qubofs::quantum;

namespace {

qubo::QuboInstance random_instance(int n, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x9a);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = u(rng);
    for (int j = i + 1; j < n; ++j) {
      const double v = -0.4 * u(rng);
      q(i, j) = v;
      q(j, i) = v;
    }
  }
  return qubo::QuboInstance(std::move(q), 0.5);
}

qubo::QuboInstance toy2() {
  Eigen::MatrixXd q(2, 2);
  q << 0.4, -0.25, -0.25, 0.1;
  return qubo::QuboInstance(q, 0.5);
}

}  // namespace

TEST_CASE("zero angles leave the uniform superposition untouched") {
  const auto instance = random_instance(5, 1);
  QaoaParams params{{0.0, 0.0}, {0.0, 0.0}};
  const auto state = qaoa_state(instance, params);
  const double expected = 1.0 / 32.0;
  for (const auto& a : state.amplitudes)
    CHECK(std::norm(a) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("single-qubit qaoa layer matches the closed-form product") {
  Eigen::MatrixXd q(1, 1);
  q << 0.8;
  const qubo::QuboInstance instance(q, 1.0);
  const double gamma = 0.7, beta = 0.3;
  const auto state = qaoa_state(instance, {{gamma}, {beta}});

  // By hand: |+> -> phase(E0=0, E1=-0.8) -> mixer rows (cos b, i sin b).
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const C b0 = inv_sqrt2 * std::exp(-i * gamma * 0.0);
  const C b1 = inv_sqrt2 * std::exp(-i * gamma * (-0.8));
  const C expected0 = std::cos(beta) * b0 + i * std::sin(beta) * b1;
  const C expected1 = i * std::sin(beta) * b0 + std::cos(beta) * b1;
  CHECK(std::abs(state.amplitudes[0] - expected0) < 1e-12);
  CHECK(std::abs(state.amplitudes[1] - expected1) < 1e-12);
}

TEST_CASE("norm stays one across random layers") {
  auto rng = make_rng(7);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto instance = random_instance(6, 100 + trial);
    QaoaParams params;
    for (int l = 0; l < 4; ++l) {
      params.gamma.push_back(angle(rng));
      params.beta.push_back(angle(rng));
    }
    CHECK(qaoa_state(instance, params).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("opposite-sign cost layers cancel") {
  const auto instance = random_instance(6, 3);
  const double g = 1.234;
  const auto state = qaoa_state(instance, {{g, -g}, {0.0, 0.0}});
  const double uniform = 1.0 / std::sqrt(64.0);
  for (const auto& a : state.amplitudes) {
    CHECK(std::abs(a.real() - uniform) < 1e-10);
    CHECK(std::abs(a.imag()) < 1e-10);
  }
}

TEST_CASE("expectation: uniform mean, point mass, random-state oracle") {
  const auto instance = random_instance(8, 4);
  const auto energies = qubo::energy_table(instance);

  const auto uniform = uniform_state(8);
  double mean = 0.0;
  for (double e : energies) mean += e / energies.size();
  CHECK(expectation(uniform, instance) == doctest::Approx(mean).epsilon(1e-12));

  const auto exact = qubo::exact_minmax(instance);
  StateVector point;
  point.n_qubits = 8;
  point.amplitudes.assign(256, {0.0, 0.0});
  point.amplitudes[exact.z_min.to_mask()] = 1.0;
  CHECK(expectation(point, instance) == doctest::Approx(exact.h_min).epsilon(1e-12));

  auto rng = make_rng(5);
  std::normal_distribution<double> g;
  StateVector random_state;
  random_state.n_qubits = 8;
  random_state.amplitudes.resize(256);
  double norm = 0.0;
  for (auto& a : random_state.amplitudes) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : random_state.amplitudes) a /= std::sqrt(norm);
  double oracle = 0.0;  // independent summation
  for (std::size_t k = 0; k < 256; ++k)
    oracle += std::norm(random_state.amplitudes[k]) * instance.evaluate_mask(k);
  CHECK(expectation(random_state, instance) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("sampling: point mass, uniform counts, input validation") {
  StateVector point;
  point.n_qubits = 3;
  point.amplitudes.assign(8, {0.0, 0.0});
  point.amplitudes[5] = 1.0;
  const auto shots = sample(point, 1000, 42);
  REQUIRE(shots.counts.size() == 1);
  CHECK(shots.counts.at(5) == 1000);

  const auto uniform = uniform_state(2);
  const auto counts = sample(uniform, 8192, 9);
  int total = 0;
  for (const auto& [mask, c] : counts.counts) {
    total += c;
    // 5 sigma around 2048 with sigma = sqrt(8192 * 1/4 * 3/4) ~ 39.2
    CHECK(std::abs(c - 2048) < 5 * 39.2);
  }
  CHECK(total == 8192);

  CHECK_THROWS(sample(uniform, 0, 1));
  StateVector bad = uniform;
  bad.amplitudes[0] *= 3.0;
  CHECK_THROWS(sample(bad, 10, 1));
}

TEST_CASE("sampled ratio approaches the exact-distribution ratio") {
  const auto instance = random_instance(6, 8);
  const auto exact = qubo::exact_minmax(instance);
  const auto energies = qubo::energy_table(instance);
  const auto state = qaoa_state(instance, {{0.6}, {0.4}});
  const double exact_ratio = distribution_ratio(state, energies, exact);
  const auto shots = sample(state, 8192, 17);
  const double sampled = approximation_ratio(instance, shots, exact);
  CHECK(std::abs(sampled - exact_ratio) < 0.01);
}

TEST_CASE("vqe states are real for all parameter settings") {
  auto rng = make_rng(11);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    VqeAnsatz ansatz;
    ansatz.layers = 2;
    for (int i = 0; i < 5 * 3; ++i) ansatz.thetas.push_back(angle(rng));
    const auto state = vqe_state(ansatz, 5);
    CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& a : state.amplitudes) CHECK(std::abs(a.imag()) < 1e-10);
  }
}

TEST_CASE("vqe ansatz validates its parameter count") {
  VqeAnsatz ansatz{2, std::vector<double>(7, 0.0)};
  CHECK_THROWS(vqe_state(ansatz, 4));  // expects 12 angles
}

TEST_CASE("single-qubit vqe reaches the better basis state") {
  Eigen::MatrixXd q(1, 1);
  q << 0.9;  // h(1) = -0.9 < h(0) = 0
  const qubo::QuboInstance instance(q, 1.0);
  const auto exact = qubo::exact_minmax(instance);
  VqeOptions options;
  options.layers = 0;
  options.seed = 3;
  const auto result = optimize_vqe(instance, exact, options);
  CHECK(result.expectation == doctest::Approx(-0.9).epsilon(1e-8));
  CHECK(result.ratio_sampled == 1.0);
}

TEST_CASE("qaoa p=1 improves on the uniform state") {
  const auto instance = toy2();
  const auto exact = qubo::exact_minmax(instance);
  QaoaOptions options;
  options.p_max = 1;
  options.seed = 19;
  const auto run = optimize_qaoa(instance, exact, options);
  REQUIRE(run.per_layer.size() == 1);
  const auto energies = qubo::energy_table(instance);
  double uniform_mean = 0.0;
  for (double e : energies) uniform_mean += e / energies.size();
  CHECK(run.per_layer[0].expectation <= uniform_mean + 1e-12);
  CHECK(run.per_layer[0].ratio_sampled >= 0.0);
  CHECK(run.per_layer[0].ratio_sampled <= 1.0);
}

TEST_CASE("warm-started layers never lose ground on the expectation") {
  const auto instance = random_instance(6, 21);
  const auto exact = qubo::exact_minmax(instance);
  QaoaOptions options;
  options.p_max = 4;
  options.seed = 5;
  options.optimizer_budget = 600;
  const auto run = optimize_qaoa(instance, exact, options);
  REQUIRE(run.per_layer.size() == 4);
  for (std::size_t p = 1; p < run.per_layer.size(); ++p)
    CHECK(run.per_layer[p].expectation <=
          run.per_layer[p - 1].expectation + 1e-9);  // appended-zero start embeds p-1
}

TEST_CASE("simulator guard rejects oversized instances") {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(25, 25);
  const qubo::QuboInstance instance(q, 0.5);
  CHECK_THROWS(qaoa_state(instance, {{0.1}, {0.1}}));
}
