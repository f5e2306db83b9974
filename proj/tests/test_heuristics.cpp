#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "doctest.h"
#include "qubofs/heuristics.hpp"
#include "qubofs/rng.hpp"

using namespace qubofs;
using namespace qubofs::heuristics;

namespace {

qubo::QuboInstance random_instance(int n, std::uint64_t seed) {
  auto rng = make_rng(seed, 0xabc);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = u(rng);
    for (int j = i + 1; j < n; ++j) {
      const double v = -0.3 * u(rng);
      q(i, j) = v;
      q(j, i) = v;
    }
  }
  return qubo::QuboInstance(std::move(q), 0.5);
}

double naive_h(const Eigen::MatrixXd& q, const BitString& z) {
  double acc = 0.0;
  const int n = static_cast<int>(q.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (z.test(i) && z.test(j)) acc += q(i, j);
  return -acc;
}

void check_common_trace_properties(const SolverTrace& trace,
                                   const qubo::QuboInstance& instance,
                                   int budget) {
  REQUIRE(!trace.entries.empty());
  CHECK(static_cast<int>(trace.entries.size()) <= budget);
  double best = trace.entries.front().objective;
  int last_ofe = 0;
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const auto& e = trace.entries[i];
    CHECK(e.ofe == last_ofe + 1);
    last_ofe = e.ofe;
    best = std::min(best, e.objective);
    CHECK(e.cumulative_best == best);
    CHECK(e.candidate.size() == static_cast<std::size_t>(instance.dimension()));
    if (i % 100 == 0)  // spot-check against the independent oracle
      CHECK(e.objective == doctest::Approx(naive_h(instance.q(), e.candidate)).epsilon(1e-12));
  }
}

SolverConfig base_config(Algorithm algo, std::uint64_t seed, int budget) {
  SolverConfig c;
  c.algorithm = algo;
  c.seed = seed;
  c.budget = budget;
  return c;
}

// Table-6 tuned settings used throughout the convergence checks.
SolverConfig tuned(Algorithm algo, std::uint64_t seed, int budget, int n) {
  SolverConfig c = base_config(algo, seed, budget);
  switch (algo) {
    case Algorithm::ea:
      c.mu = 52;
      c.r_m = 0.042;
      c.o_m = MutationOp::bit_flip;
      c.o_r = RecombinationOp::uniform;
      break;
    case Algorithm::saea:
      c.mu = 14;
      c.tau = std::pow(10.0, -1.32);
      c.p_r = 0.30;
      break;
    case Algorithm::ueda:
      c.mu = 15;
      c.tau = 0.95;
      break;
    case Algorithm::dcma:
      c.mu = 19;
      c.sigma_init = std::pow(10.0, -2.03);
      c.alpha_margin = std::pow(19.0 * n, -1.23);
      break;
    default:
      break;
  }
  return c;
}

}  // namespace

TEST_CASE("init_candidate: n = 1 always selects the single bit") {
  auto rng = make_rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto z = init_candidate(1, rng);
    CHECK(z.popcount() == 1);
  }
}

TEST_CASE("init_candidate popcounts are uniform over 1..n") {
  const int n = 27, draws = 100000;
  auto rng = make_rng(123);
  std::array<int, 28> histogram{};
  for (int i = 0; i < draws; ++i) {
    const auto z = init_candidate(n, rng);
    const int pc = z.popcount();
    REQUIRE(pc >= 1);
    REQUIRE(pc <= n);
    ++histogram[pc];
  }
  const double expected = static_cast<double>(draws) / n;
  double chi2 = 0.0;
  for (int k = 1; k <= n; ++k)
    chi2 += (histogram[k] - expected) * (histogram[k] - expected) / expected;
  CHECK(chi2 < 45.64);  // chi^2(26 df) critical value at alpha = 0.01
}

TEST_CASE("mutation operators change exactly the advertised bits") {
  auto rng = make_rng(5);
  SUBCASE("single bit-flip has Hamming distance one") {
    for (int t = 0; t < 50; ++t) {
      BitString z = init_candidate(12, rng);
      BitString m = z;
      mutate_bit_flip(m, 1, rng);
      int distance = 0;
      for (int i = 0; i < 12; ++i) distance += z.test(i) != m.test(i);
      CHECK(distance == 1);
    }
  }
  SUBCASE("bit-flip flips distinct positions") {
    BitString z(10);
    BitString m = z;
    mutate_bit_flip(m, 10, rng);
    CHECK(m.popcount() == 10);  // all-distinct flips of an all-zero string
  }
  SUBCASE("block inversion flips one contiguous block") {
    BitString z(10);
    BitString m = z;
    mutate_block_inversion(m, 4, rng);
    CHECK(m.popcount() == 4);
    int first = -1, last = -1;
    for (int i = 0; i < 10; ++i)
      if (m.test(i)) {
        if (first < 0) first = i;
        last = i;
      }
    CHECK(last - first + 1 == 4);
  }
  SUBCASE("cycle preserves popcount") {
    for (int t = 0; t < 20; ++t) {
      BitString z = init_candidate(13, rng);
      BitString m = z;
      mutate_cycle(m, 1 + t % 12, rng);
      CHECK(m.popcount() == z.popcount());
    }
  }
}

TEST_CASE("mutation_count maps the rate to at least one bit") {
  CHECK(mutation_count(0.0, 27) == 1);
  CHECK(mutation_count(0.042, 27) == 1);   // round(1.134)
  CHECK(mutation_count(0.1, 27) == 3);     // round(2.7)
  CHECK(mutation_count(1.0, 27) == 27);
}

TEST_CASE("uniform crossover of identical parents returns the clone") {
  auto rng = make_rng(6);
  const BitString a = init_candidate(16, rng);
  for (auto op : {RecombinationOp::one_point, RecombinationOp::two_point,
                  RecombinationOp::uniform})
    CHECK(recombine(a, a, op, rng) == a);
}

TEST_CASE("one-point crossover concatenates prefixes and suffixes") {
  auto rng = make_rng(7);
  BitString a(8), b(8);
  for (int i = 0; i < 8; ++i) b.set(i, true);
  const auto child = recombine(a, b, RecombinationOp::one_point, rng);
  // Must be 0^k 1^(8-k) for some k in [1, 7].
  int transitions = 0;
  for (int i = 1; i < 8; ++i) transitions += child.test(i) != child.test(i - 1);
  CHECK(transitions == 1);
  CHECK_FALSE(child.test(0));
  CHECK(child.test(7));
}

TEST_CASE("ueda update formula and clamp") {
  CHECK(ueda_update(0.5, 1.0, 0.95, 27) == 1.0 - 1.0 / 27.0);
  CHECK(ueda_update(0.5, 1.0, 0.95, 27) == doctest::Approx(0.962963).epsilon(1e-6));
  CHECK(ueda_update(0.4, 0.8, 0.0, 27) == 0.4);  // tau = 0: no learning
  CHECK(ueda_update(0.01, 0.0, 0.5, 10) == 0.1);  // lower clamp 1/n
}

TEST_CASE("saea rate mutation: identity at tau = 0, clamped to [1/n, 1]") {
  auto rng = make_rng(8);
  CHECK(saea_mutate_rate(0.37, 0.0, 27, rng) == 0.37);
  for (int t = 0; t < 200; ++t) {
    const double r = saea_mutate_rate(0.5, 2.0, 27, rng);
    CHECK(r >= 1.0 / 27);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("random search: budget accounting and determinism") {
  const auto instance = random_instance(10, 1);
  auto config = base_config(Algorithm::rs, 33, 1);
  const auto one = run_random_search(instance, config);
  CHECK(one.entries.size() == 1);

  config.budget = 500;
  const auto t1 = run_random_search(instance, config);
  const auto t2 = run_random_search(instance, config);
  REQUIRE(t1.entries.size() == t2.entries.size());
  for (std::size_t i = 0; i < t1.entries.size(); ++i) {
    CHECK(t1.entries[i].candidate == t2.entries[i].candidate);
    CHECK(t1.entries[i].objective == t2.entries[i].objective);
  }
  check_common_trace_properties(t1, instance, 500);

  const auto exact = qubo::exact_minmax(instance);
  CHECK(t1.final_best() >= exact.h_min);
  CHECK(t1.final_best() <= exact.h_max);
}

TEST_CASE("greedy restart solves a separable instance within one descent") {
  const int n = 10;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  q.diagonal() << 0.31, 0.12, 0.93, 0.27, 0.55, 0.08, 0.71, 0.44, 0.19, 0.66;
  const qubo::QuboInstance instance(q, 1.0);
  const auto exact = qubo::exact_minmax(instance);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto config = base_config(Algorithm::grs, seed, n * n + n + 1);
    const auto trace = run_greedy_restart(instance, config);
    CHECK(trace.final_best() == exact.h_min);  // no local optima when separable
  }
}

TEST_CASE("greedy restart: accepted moves strictly improve") {
  const auto instance = random_instance(12, 2);
  const auto trace =
      run_greedy_restart(instance, base_config(Algorithm::grs, 4, 2000));
  check_common_trace_properties(trace, instance, 2000);
  double best = trace.entries.front().cumulative_best;
  for (const auto& e : trace.entries) {
    if (e.cumulative_best != best) CHECK(e.cumulative_best < best);
    best = e.cumulative_best;
  }
}

TEST_CASE("greedy restart reaches the optimum on nearly every 12-bit run") {
  const auto instance = random_instance(12, 3);
  const auto exact = qubo::exact_minmax(instance);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto trace =
        run_greedy_restart(instance, base_config(Algorithm::grs, seed, 5000));
    hits += trace.final_best() == exact.h_min;
  }
  CHECK(hits >= 19);
}

TEST_CASE("ea converges on most seeds with the tuned configuration") {
  const auto instance = random_instance(12, 4);
  const auto exact = qubo::exact_minmax(instance);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto trace = run_ea(instance, tuned(Algorithm::ea, seed, 5000, 12));
    check_common_trace_properties(trace, instance, 5000);
    hits += trace.final_best() == exact.h_min;
  }
  CHECK(hits >= 15);
}

TEST_CASE("ea rejects undersized populations") {
  const auto instance = random_instance(6, 5);
  auto config = base_config(Algorithm::ea, 1, 100);
  config.mu = 3;
  CHECK_THROWS(run_ea(instance, config));
}

TEST_CASE("saea converges with the tuned configuration") {
  const auto instance = random_instance(12, 6);
  const auto exact = qubo::exact_minmax(instance);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto trace = run_saea(instance, tuned(Algorithm::saea, seed, 5000, 12));
    check_common_trace_properties(trace, instance, 5000);
    hits += trace.final_best() == exact.h_min;
  }
  CHECK(hits >= 18);
}

TEST_CASE("ueda converges with the tuned configuration") {
  const auto instance = random_instance(12, 7);
  const auto exact = qubo::exact_minmax(instance);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto trace = run_ueda(instance, tuned(Algorithm::ueda, seed, 5000, 12));
    check_common_trace_properties(trace, instance, 5000);
    hits += trace.final_best() == exact.h_min;
  }
  CHECK(hits >= 18);
}

TEST_CASE("dcma converges with the tuned configuration") {
  const auto instance = random_instance(12, 8);
  const auto exact = qubo::exact_minmax(instance);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto trace = run_dcma(instance, tuned(Algorithm::dcma, seed, 5000, 12));
    check_common_trace_properties(trace, instance, 5000);
    hits += trace.final_best() == exact.h_min;
  }
  CHECK(hits >= 18);
}

TEST_CASE("dcma margin prevents permanent bit fixation") {
  // Needle instance: one dominant diagonal entry invites early collapse.
  const int n = 12;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  q.diagonal().setConstant(0.05);
  q(0, 0) = 5.0;
  const qubo::QuboInstance instance(q, 1.0);

  auto flips_in_tail = [&](double alpha_margin, std::uint64_t seed) {
    SolverConfig config = base_config(Algorithm::dcma, seed, 4000);
    config.mu = 20;
    config.sigma_init = 1.0;
    config.alpha_margin = alpha_margin;
    const auto trace = run_dcma(instance, config);
    const std::size_t window = 400;
    std::vector<int> seen0(n, 0), seen1(n, 0);
    for (std::size_t i = trace.entries.size() - window; i < trace.entries.size(); ++i)
      for (int j = 0; j < n; ++j)
        (trace.entries[i].candidate.test(j) ? seen1[j] : seen0[j]) += 1;
    int varying = 0;
    for (int j = 0; j < n; ++j) varying += seen0[j] > 0 && seen1[j] > 0;
    return varying;
  };

  const double upper_bound_margin = std::pow(20.0 * n, -0.5);
  CHECK(flips_in_tail(upper_bound_margin, 11) == n);  // margin: every bit keeps moving
  CHECK(flips_in_tail(1e-12, 11) < n);                // disabled: fixation occurs
}

TEST_CASE("all solvers are seed-deterministic") {
  const auto instance = random_instance(10, 9);
  for (auto algo : {Algorithm::rs, Algorithm::grs, Algorithm::ea, Algorithm::saea,
                    Algorithm::ueda, Algorithm::dcma}) {
    auto config = tuned(algo, 99, 600, 10);
    config.alpha_margin = algo == Algorithm::dcma ? std::pow(19.0 * 10, -1.23) : 0.0;
    const auto t1 = run(instance, config);
    const auto t2 = run(instance, config);
    REQUIRE(t1.entries.size() == t2.entries.size());
    for (std::size_t i = 0; i < t1.entries.size(); ++i) {
      CHECK(t1.entries[i].candidate == t2.entries[i].candidate);
      CHECK(t1.entries[i].objective == t2.entries[i].objective);
    }
    CHECK(static_cast<int>(t1.entries.size()) == 600);  // exact budget use
  }
}
