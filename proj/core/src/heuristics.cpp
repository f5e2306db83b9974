#include "qubofs/heuristics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qubofs::heuristics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Budget accounting: one OFE per objective evaluation, no caching.
class Budget {
 public:
  Budget(const qubo::QuboInstance& instance, const SolverConfig& config)
      : instance_(instance), budget_(config.budget) {
    if (config.budget < 1) throw std::invalid_argument("budget must be >= 1");
    trace_.config = config;
    trace_.entries.reserve(static_cast<std::size_t>(config.budget));
  }

  bool exhausted() const {
    return static_cast<int>(trace_.entries.size()) >= budget_;
  }

  double evaluate(const BitString& z) {
    if (exhausted()) throw std::logic_error("evaluation past budget");
    const double h = instance_.evaluate(z);
    best_ = std::min(best_, h);
    trace_.entries.push_back(
        {static_cast<int>(trace_.entries.size()) + 1, z, h, best_});
    return h;
  }

  SolverTrace take() && {
    trace_.reason = TerminationReason::budget;
    return std::move(trace_);
  }

 private:
  const qubo::QuboInstance& instance_;
  SolverTrace trace_;
  int budget_;
  double best_ = kInf;
};

int require_dimension(const qubo::QuboInstance& instance) {
  return instance.dimension();
}

void require_population(const SolverConfig& config) {
  if (config.mu < 4) throw std::invalid_argument("population size must be >= 4");
}

MutationOp random_mutation_op(Rng& rng) {
  return static_cast<MutationOp>(std::uniform_int_distribution<int>(1, 3)(rng));
}

RecombinationOp random_recombination_op(Rng& rng) {
  return static_cast<RecombinationOp>(std::uniform_int_distribution<int>(1, 3)(rng));
}

// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9).
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile domain");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::rs: return "RS";
    case Algorithm::grs: return "GRS";
    case Algorithm::ea: return "EA";
    case Algorithm::saea: return "SAEA";
    case Algorithm::ueda: return "UEDA";
    case Algorithm::dcma: return "DCMA";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "rs") return Algorithm::rs;
  if (s == "grs") return Algorithm::grs;
  if (s == "ea") return Algorithm::ea;
  if (s == "saea") return Algorithm::saea;
  if (s == "ueda" || s == "pbil") return Algorithm::ueda;
  if (s == "dcma") return Algorithm::dcma;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

double SolverTrace::best_at(int ofe) const {
  if (entries.empty()) throw std::logic_error("empty trace");
  const int idx = std::min<int>(ofe, static_cast<int>(entries.size())) - 1;
  if (idx < 0) throw std::invalid_argument("ofe must be >= 1");
  return entries[static_cast<std::size_t>(idx)].cumulative_best;
}

BitString init_candidate(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  const int n_bit = std::uniform_int_distribution<int>(1, n)(rng);
  // Partial Fisher-Yates: the first n_bit entries are a uniform subset.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n_bit; ++i) {
    const int j = std::uniform_int_distribution<int>(i, n - 1)(rng);
    std::swap(idx[i], idx[j]);
  }
  BitString z(n);
  for (int i = 0; i < n_bit; ++i) z.set(idx[i], true);
  return z;
}

int mutation_count(double r_m, int n) {
  const int count = static_cast<int>(std::lround(r_m * n));
  return std::clamp(count, 1, n);
}

void mutate_bit_flip(BitString& z, int count, Rng& rng) {
  const int n = static_cast<int>(z.size());
  count = std::clamp(count, 1, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = std::uniform_int_distribution<int>(i, n - 1)(rng);
    std::swap(idx[i], idx[j]);
    z.flip(idx[i]);
  }
}

void mutate_block_inversion(BitString& z, int count, Rng& rng) {
  const int n = static_cast<int>(z.size());
  count = std::clamp(count, 1, n);
  const int start = std::uniform_int_distribution<int>(0, n - count)(rng);
  for (int i = start; i < start + count; ++i) z.flip(i);
}

void mutate_cycle(BitString& z, int count, Rng& rng) {
  const int n = static_cast<int>(z.size());
  const int shift = std::clamp(count, 1, n) % n;
  if (shift == 0) return;
  const bool right = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  BitString rotated(n);
  for (int i = 0; i < n; ++i) {
    const int src = right ? (i - shift + n) % n : (i + shift) % n;
    rotated.set(i, z.test(src));
  }
  z = rotated;
}

void mutate(BitString& z, MutationOp op, int count, Rng& rng) {
  switch (op) {
    case MutationOp::bit_flip: mutate_bit_flip(z, count, rng); break;
    case MutationOp::block_inversion: mutate_block_inversion(z, count, rng); break;
    case MutationOp::cycle: mutate_cycle(z, count, rng); break;
  }
}

BitString recombine(const BitString& a, const BitString& b, RecombinationOp op,
                    Rng& rng) {
  const int n = static_cast<int>(a.size());
  if (a.size() != b.size()) throw std::invalid_argument("parent length mismatch");
  BitString child = a;
  switch (op) {
    case RecombinationOp::one_point: {
      if (n < 2) return child;
      const int point = std::uniform_int_distribution<int>(1, n - 1)(rng);
      for (int i = point; i < n; ++i) child.set(i, b.test(i));
      break;
    }
    case RecombinationOp::two_point: {
      int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
      int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
      if (i > j) std::swap(i, j);
      child = b;
      for (int k = i; k <= j; ++k) child.set(k, a.test(k));
      break;
    }
    case RecombinationOp::uniform: {
      for (int i = 0; i < n; ++i)
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 1) child.set(i, b.test(i));
      break;
    }
  }
  return child;
}

double ueda_update(double p, double p_star, double tau, int n) {
  const double updated = p * (1.0 - tau) + p_star * tau;
  return std::clamp(updated, 1.0 / n, 1.0 - 1.0 / n);
}

double saea_mutate_rate(double theta1, double tau, int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double mutated = theta1 * std::exp(tau * normal(rng));
  return std::clamp(mutated, 1.0 / n, 1.0);
}

SolverTrace run_random_search(const qubo::QuboInstance& instance,
                              const SolverConfig& config) {
  const int n = require_dimension(instance);
  Budget budget(instance, config);
  auto rng = make_rng(config.seed);
  while (!budget.exhausted()) budget.evaluate(init_candidate(n, rng));
  return std::move(budget).take();
}

SolverTrace run_greedy_restart(const qubo::QuboInstance& instance,
                               const SolverConfig& config) {
  const int n = require_dimension(instance);
  Budget budget(instance, config);
  auto rng = make_rng(config.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  while (!budget.exhausted()) {
    BitString current = init_candidate(n, rng);
    double h_current = budget.evaluate(current);
    bool at_local_optimum = false;
    while (!at_local_optimum && !budget.exhausted()) {
      std::shuffle(order.begin(), order.end(), rng);
      bool improved = false;
      for (int bit : order) {
        if (budget.exhausted()) break;
        current.flip(bit);
        const double h = budget.evaluate(current);
        if (h < h_current) {
          h_current = h;  // first improvement: keep the flip, restart the sweep
          improved = true;
          break;
        }
        current.flip(bit);
      }
      if (!improved) at_local_optimum = true;
    }
  }
  return std::move(budget).take();
}

namespace {

struct Individual {
  BitString z;
  double h = 0.0;
  // Self-adapted genes (SAEA only).
  double theta1 = 0.0;
  MutationOp theta2 = MutationOp::bit_flip;
  RecombinationOp theta3 = RecombinationOp::uniform;
};

void truncate_to_best(std::vector<Individual>& pool, int mu) {
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Individual& a, const Individual& b) { return a.h < b.h; });
  if (static_cast<int>(pool.size()) > mu) pool.resize(static_cast<std::size_t>(mu));
}

}  // namespace

SolverTrace run_ea(const qubo::QuboInstance& instance, const SolverConfig& config) {
  const int n = require_dimension(instance);
  require_population(config);
  Budget budget(instance, config);
  auto rng = make_rng(config.seed);

  std::vector<Individual> population;
  for (int i = 0; i < config.mu && !budget.exhausted(); ++i) {
    Individual ind{init_candidate(n, rng)};
    ind.h = budget.evaluate(ind.z);
    population.push_back(std::move(ind));
  }

  std::uniform_int_distribution<int> pick(0, config.mu - 1);
  const int bits_changed = mutation_count(config.r_m, n);
  while (!budget.exhausted()) {
    std::vector<Individual> pool = population;
    for (int i = 0; i < config.mu && !budget.exhausted(); ++i) {
      const Individual& p1 = population[pick(rng) % population.size()];
      const Individual& p2 = population[pick(rng) % population.size()];
      Individual child;
      child.z = recombine(p1.z, p2.z, config.o_r, rng);
      mutate(child.z, config.o_m, bits_changed, rng);
      child.h = budget.evaluate(child.z);
      pool.push_back(std::move(child));
    }
    truncate_to_best(pool, config.mu);
    population = std::move(pool);
  }
  return std::move(budget).take();
}

SolverTrace run_saea(const qubo::QuboInstance& instance, const SolverConfig& config) {
  const int n = require_dimension(instance);
  require_population(config);
  if (!(config.tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  Budget budget(instance, config);
  auto rng = make_rng(config.seed);

  std::vector<Individual> population;
  for (int i = 0; i < config.mu && !budget.exhausted(); ++i) {
    Individual ind{init_candidate(n, rng)};
    ind.theta1 = 1.0 / n;
    ind.theta2 = random_mutation_op(rng);
    ind.theta3 = random_recombination_op(rng);
    ind.h = budget.evaluate(ind.z);
    population.push_back(std::move(ind));
  }

  std::uniform_int_distribution<int> pick(0, config.mu - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (!budget.exhausted()) {
    std::vector<Individual> pool = population;
    for (int i = 0; i < config.mu && !budget.exhausted(); ++i) {
      const Individual& p1 = population[pick(rng) % population.size()];
      const Individual& p2 = population[pick(rng) % population.size()];
      Individual child;
      // Rate: log-normal mutation per parent, then intermediate crossover.
      const double r1 = saea_mutate_rate(p1.theta1, config.tau, n, rng);
      const double r2 = saea_mutate_rate(p2.theta1, config.tau, n, rng);
      child.theta1 = std::clamp(0.5 * (r1 + r2), 1.0 / n, 1.0);
      // Operator genes: re-draw with probability p_r, else first parent's gene.
      child.theta2 = unit(rng) < config.p_r ? random_mutation_op(rng) : p1.theta2;
      child.theta3 = unit(rng) < config.p_r ? random_recombination_op(rng) : p1.theta3;
      child.z = recombine(p1.z, p2.z, child.theta3, rng);
      mutate(child.z, child.theta2, mutation_count(child.theta1, n), rng);
      child.h = budget.evaluate(child.z);
      pool.push_back(std::move(child));
    }
    truncate_to_best(pool, config.mu);
    population = std::move(pool);
  }
  return std::move(budget).take();
}

SolverTrace run_ueda(const qubo::QuboInstance& instance, const SolverConfig& config) {
  const int n = require_dimension(instance);
  require_population(config);
  if (!(config.tau >= 0.0 && config.tau <= 1.0))
    throw std::invalid_argument("tau must lie in [0,1]");
  Budget budget(instance, config);
  auto rng = make_rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> prob(static_cast<std::size_t>(n), 0.5);
  const int n_select = (config.mu + 1) / 2;  // better 50%, rounded up when odd

  bool first_generation = true;
  while (!budget.exhausted()) {
    std::vector<Individual> generation;
    for (int i = 0; i < config.mu && !budget.exhausted(); ++i) {
      BitString z(n);
      if (first_generation) {
        z = init_candidate(n, rng);
      } else {
        for (int j = 0; j < n; ++j) z.set(j, unit(rng) < prob[j]);
      }
      Individual ind{std::move(z)};
      ind.h = budget.evaluate(ind.z);
      generation.push_back(std::move(ind));
    }
    first_generation = false;
    if (generation.empty()) break;
    std::stable_sort(generation.begin(), generation.end(),
                     [](const Individual& a, const Individual& b) { return a.h < b.h; });
    const int k = std::min<int>(n_select, static_cast<int>(generation.size()));
    for (int j = 0; j < n; ++j) {
      double mean = 0.0;
      for (int i = 0; i < k; ++i) mean += generation[i].z.test(j) ? 1.0 : 0.0;
      prob[j] = ueda_update(prob[j], mean / k, config.tau, n);
    }
  }
  return std::move(budget).take();
}

SolverTrace run_dcma(const qubo::QuboInstance& instance, const SolverConfig& config) {
  const int n = require_dimension(instance);
  require_population(config);
  if (!(config.sigma_init > 0.0))
    throw std::invalid_argument("sigma_init must be > 0");
  Budget budget(instance, config);
  auto rng = make_rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int lambda = config.mu;
  const double alpha =
      config.alpha_margin > 0.0
          ? config.alpha_margin
          : 1.0 / (static_cast<double>(lambda) * n);  // suggested default (mu*n)^-1
  const double margin = std::min(alpha, 0.49);

  // CMA-ES constants with active (negative-weight) covariance updates.
  const int mu_sel = lambda / 2;
  Eigen::VectorXd weights_raw(lambda);
  for (int i = 0; i < lambda; ++i)
    weights_raw(i) = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  const double sum_pos = weights_raw.head(mu_sel).sum();
  const double mu_eff =
      sum_pos * sum_pos / weights_raw.head(mu_sel).squaredNorm();
  const double sum_neg = weights_raw.tail(lambda - mu_sel).sum();
  const double mu_eff_neg =
      sum_neg * sum_neg / weights_raw.tail(lambda - mu_sel).squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu = std::min(
      1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  // Negative weights are scaled by the usual admissibility limits.
  const double alpha_mu = 1.0 + c_1 / c_mu;
  const double alpha_mueff = 1.0 + 2.0 * mu_eff_neg / (mu_eff + 2.0);
  const double alpha_posdef = (1.0 - c_1 - c_mu) / (n * c_mu);
  Eigen::VectorXd weights(lambda);
  for (int i = 0; i < lambda; ++i)
    weights(i) = weights_raw(i) >= 0.0
                     ? weights_raw(i) / sum_pos
                     : weights_raw(i) *
                           std::min({alpha_mu, alpha_mueff, alpha_posdef}) /
                           std::abs(sum_neg);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd path_sigma = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd path_c = Eigen::VectorXd::Zero(n);
  double sigma = config.sigma_init;

  struct Sample {
    Eigen::VectorXd y;
    double h;
  };

  int generation = 0;
  while (!budget.exhausted()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::VectorXd eigenvalues = eig.eigenvalues().cwiseMax(1e-20);
    const Eigen::MatrixXd& basis = eig.eigenvectors();
    const Eigen::VectorXd scale = eigenvalues.cwiseSqrt();

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(lambda));
    for (int k = 0; k < lambda && !budget.exhausted(); ++k) {
      Eigen::VectorXd xi(n);
      for (int j = 0; j < n; ++j) xi(j) = normal(rng);
      Eigen::VectorXd y = basis * (scale.asDiagonal() * xi);
      Eigen::VectorXd x = mean + sigma * y;
      BitString z(n);
      for (int j = 0; j < n; ++j) z.set(j, x(j) > 0.0);  // threshold at 0
      samples.push_back({std::move(y), budget.evaluate(z)});
    }
    if (static_cast<int>(samples.size()) < lambda) break;  // budget ran out mid-generation

    std::stable_sort(samples.begin(), samples.end(),
                     [](const Sample& a, const Sample& b) { return a.h < b.h; });

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu_sel; ++i) y_w += weights(i) * samples[i].y;
    mean += sigma * y_w;

    const Eigen::MatrixXd inv_sqrt =
        basis * scale.cwiseInverse().asDiagonal() * basis.transpose();
    path_sigma = (1.0 - c_sigma) * path_sigma +
                 std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * (inv_sqrt * y_w);
    ++generation;
    const double ps_norm = path_sigma.norm();
    const bool h_sig =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * generation)) <
        (1.4 + 2.0 / (n + 1.0)) * chi_n;
    path_c = (1.0 - c_c) * path_c;
    if (h_sig) path_c += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < lambda; ++i) {
      const double w = weights(i);
      if (w >= 0.0) {
        rank_mu += w * (samples[i].y * samples[i].y.transpose());
      } else {
        const double scaling = double(n) / (inv_sqrt * samples[i].y).squaredNorm();
        rank_mu += w * scaling * (samples[i].y * samples[i].y.transpose());
      }
    }
    cov = (1.0 + c_1 * (h_sig ? 0.0 : c_c * (2.0 - c_c)) - c_1 -
           c_mu * weights.sum()) *
              cov +
          c_1 * (path_c * path_c.transpose()) + c_mu * rank_mu;

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));
    sigma = std::clamp(sigma, 1e-12, 1e12);

    // Margin: keep each coordinate's flip probability at least `margin`
    // by pulling the mean back toward the threshold.
    for (int j = 0; j < n; ++j) {
      const double sd = sigma * std::sqrt(std::max(cov(j, j), 1e-20));
      const double p_up = norm_cdf(mean(j) / sd);
      if (p_up < margin)
        mean(j) = sd * norm_quantile(margin);
      else if (p_up > 1.0 - margin)
        mean(j) = sd * norm_quantile(1.0 - margin);
    }
  }
  return std::move(budget).take();
}

SolverTrace run(const qubo::QuboInstance& instance, const SolverConfig& config) {
  switch (config.algorithm) {
    case Algorithm::rs: return run_random_search(instance, config);
    case Algorithm::grs: return run_greedy_restart(instance, config);
    case Algorithm::ea: return run_ea(instance, config);
    case Algorithm::saea: return run_saea(instance, config);
    case Algorithm::ueda: return run_ueda(instance, config);
    case Algorithm::dcma: return run_dcma(instance, config);
  }
  throw std::invalid_argument("unknown algorithm");
}

void write_trace_csv(const SolverTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "ofe,popcount,objective,cumulative_best\n";
  char buf[64];
  for (const auto& e : trace.entries) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6g,%.6g\n", e.ofe,
                  e.candidate.popcount(), e.objective, e.cumulative_best);
    out << buf;
  }
}

}  // namespace qubofs::heuristics
