#include "qubofs/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qubofs/rng.hpp"
#include "qubofs/simplex.hpp"

namespace qubofs::quantum {
namespace {

void require_qubits(int n) {
  if (n < 1) throw std::invalid_argument("need at least one qubit");
  if (n > kMaxQubits)
    throw std::invalid_argument("state-vector simulation limited to " +
                                std::to_string(kMaxQubits) + " qubits");
}

void require_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite angle");
}

// Diagonal cost layer: a_k *= exp(-i * gamma * E_k).
void apply_cost_layer(StateVector& state, const std::vector<double>& energies,
                      double gamma) {
  for (std::size_t k = 0; k < state.amplitudes.size(); ++k)
    state.amplitudes[k] *= std::polar(1.0, -gamma * energies[k]);
}

// Standard mixer e^{i beta X} on one qubit:
//   a0' = cos(beta) a0 + i sin(beta) a1,  a1' = i sin(beta) a0 + cos(beta) a1.
void apply_mixer_layer(StateVector& state, double beta) {
  const double c = std::cos(beta);
  const std::complex<double> is(0.0, std::sin(beta));
  const std::size_t size = state.amplitudes.size();
  for (int q = 0; q < state.n_qubits; ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < size; base += 2 * stride)
      for (std::size_t k = base; k < base + stride; ++k) {
        const auto a0 = state.amplitudes[k];
        const auto a1 = state.amplitudes[k + stride];
        state.amplitudes[k] = c * a0 + is * a1;
        state.amplitudes[k + stride] = is * a0 + c * a1;
      }
  }
}

// Ry(theta) on one qubit: a0' = cos(t/2) a0 - sin(t/2) a1, a1' = sin(t/2) a0 + cos(t/2) a1.
void apply_ry(StateVector& state, int qubit, double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t size = state.amplitudes.size();
  for (std::size_t base = 0; base < size; base += 2 * stride)
    for (std::size_t k = base; k < base + stride; ++k) {
      const auto a0 = state.amplitudes[k];
      const auto a1 = state.amplitudes[k + stride];
      state.amplitudes[k] = c * a0 - s * a1;
      state.amplitudes[k + stride] = s * a0 + c * a1;
    }
}

// CNOT with control q, target q+1 (chain entanglement).
void apply_cnot(StateVector& state, int control, int target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t k = 0; k < state.amplitudes.size(); ++k)
    if ((k & cbit) && !(k & tbit))
      std::swap(state.amplitudes[k], state.amplitudes[k | tbit]);
}

std::vector<double> energies_for(const qubo::QuboInstance& instance) {
  require_qubits(instance.dimension());
  return qubo::energy_table(instance);
}

}  // namespace

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  return std::sqrt(acc);
}

StateVector uniform_state(int n_qubits) {
  require_qubits(n_qubits);
  StateVector state;
  state.n_qubits = n_qubits;
  const std::size_t size = std::size_t{1} << n_qubits;
  state.amplitudes.assign(size, std::complex<double>(1.0 / std::sqrt(double(size)), 0.0));
  return state;
}

StateVector qaoa_state(const std::vector<double>& energies, int n_qubits,
                       const QaoaParams& params) {
  require_qubits(n_qubits);
  if (params.gamma.size() != params.beta.size())
    throw std::invalid_argument("gamma and beta must have equal length");
  if (params.layers() < 1) throw std::invalid_argument("need at least one layer");
  require_finite(params.gamma);
  require_finite(params.beta);
  if (energies.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("energy table size mismatch");

  StateVector state = uniform_state(n_qubits);
  for (int layer = 0; layer < params.layers(); ++layer) {
    apply_cost_layer(state, energies, params.gamma[layer]);
    apply_mixer_layer(state, params.beta[layer]);
  }
  return state;
}

StateVector qaoa_state(const qubo::QuboInstance& instance, const QaoaParams& params) {
  return qaoa_state(energies_for(instance), instance.dimension(), params);
}

StateVector vqe_state(const VqeAnsatz& ansatz, int n_qubits) {
  require_qubits(n_qubits);
  if (ansatz.layers < 0) throw std::invalid_argument("layers must be >= 0");
  const std::size_t expected = static_cast<std::size_t>(n_qubits) * (ansatz.layers + 1);
  if (ansatz.thetas.size() != expected)
    throw std::invalid_argument("expected " + std::to_string(expected) + " angles");
  require_finite(ansatz.thetas);

  StateVector state;
  state.n_qubits = n_qubits;
  state.amplitudes.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
  state.amplitudes[0] = 1.0;

  std::size_t next = 0;
  for (int block = 0; block < ansatz.layers; ++block) {
    for (int q = 0; q < n_qubits; ++q) apply_ry(state, q, ansatz.thetas[next++]);
    for (int q = 0; q + 1 < n_qubits; ++q) apply_cnot(state, q, q + 1);
  }
  for (int q = 0; q < n_qubits; ++q) apply_ry(state, q, ansatz.thetas[next++]);
  return state;
}

double expectation(const StateVector& state, const std::vector<double>& energies) {
  if (energies.size() != state.amplitudes.size())
    throw std::invalid_argument("dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k)
    acc += std::norm(state.amplitudes[k]) * energies[k];
  return acc;
}

double expectation(const StateVector& state, const qubo::QuboInstance& instance) {
  return expectation(state, energies_for(instance));
}

ShotResult sample(const StateVector& state, int shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be positive");
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::invalid_argument("state is not normalized");

  std::vector<double> cumulative(state.amplitudes.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < state.amplitudes.size(); ++k) {
    acc += std::norm(state.amplitudes[k]);
    cumulative[k] = acc;
  }
  cumulative.back() = 1.0;

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ShotResult result;
  result.shots = shots;
  for (int s = 0; s < shots; ++s) {
    const double u = unit(rng);
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    result.counts[static_cast<std::uint64_t>(it - cumulative.begin())] += 1;
  }
  return result;
}

double approximation_ratio(const qubo::QuboInstance& instance, const ShotResult& shots,
                           const qubo::ExactSolution& exact) {
  return qubo::approximation_ratio(instance, shots.counts, exact);
}

double distribution_ratio(const StateVector& state, const std::vector<double>& energies,
                          const qubo::ExactSolution& exact) {
  if (!(exact.h_max > exact.h_min)) throw std::invalid_argument("flat objective");
  const double e = expectation(state, energies);
  return (e - exact.h_max) / (exact.h_min - exact.h_max);
}

namespace {

// Least-squares polynomial fit of values v_k against k = 1..m, degree <= 2,
// evaluated at k = 1..points.
std::vector<double> poly_fit_resample(const std::vector<double>& v, int degree,
                                      int points) {
  const int m = static_cast<int>(v.size());
  const int terms = degree + 1;
  Eigen::MatrixXd design(m, terms);
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < terms; ++t) design(i, t) = std::pow(double(i + 1), t);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) rhs(i) = v[i];
  Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int k = 1; k <= points; ++k) {
    double acc = 0.0;
    for (int t = 0; t < terms; ++t) acc += coef(t) * std::pow(double(k), t);
    out[k - 1] = acc;
  }
  return out;
}

std::vector<double> extrapolate_one(const std::vector<double>& v) {
  std::vector<double> out = v;
  const std::size_t m = v.size();
  out.push_back(m >= 2 ? v[m - 1] + (v[m - 1] - v[m - 2]) : v.back());
  return out;
}

std::vector<double> append_zero(const std::vector<double>& v) {
  std::vector<double> out = v;
  out.push_back(0.0);
  return out;
}

// Layer-wise warm-start candidates built from the previous layer's optimum.
std::vector<QaoaParams> warm_starts(const QaoaParams& previous, int p) {
  std::vector<QaoaParams> starts;
  starts.push_back({extrapolate_one(previous.gamma), extrapolate_one(previous.beta)});
  starts.push_back({poly_fit_resample(previous.gamma, 1, p),
                    poly_fit_resample(previous.beta, 1, p)});
  if (previous.layers() >= 3)
    starts.push_back({poly_fit_resample(previous.gamma, 2, p),
                      poly_fit_resample(previous.beta, 2, p)});
  starts.push_back({append_zero(previous.gamma), append_zero(previous.beta)});
  return starts;
}

}  // namespace

QaoaRun optimize_qaoa(const qubo::QuboInstance& instance,
                      const qubo::ExactSolution& exact, const QaoaOptions& options) {
  if (options.p_max < 1) throw std::invalid_argument("p_max must be >= 1");
  const int n = instance.dimension();
  const auto energies = energies_for(instance);
  auto rng = make_rng(options.seed);

  QaoaRun run;
  heuristics::SolverConfig trace_config;
  trace_config.budget = options.p_max * 8 * options.optimizer_budget;
  trace_config.seed = options.seed;
  run.trace.config = trace_config;

  int total_evals = 0;
  double best_seen = std::numeric_limits<double>::infinity();
  auto record = [&](const StateVector& state, double value) {
    // One trace entry per optimized start; the candidate is the most
    // probable basis state of that start's final state.
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < state.amplitudes.size(); ++k)
      if (std::norm(state.amplitudes[k]) > std::norm(state.amplitudes[argmax]))
        argmax = k;
    best_seen = std::min(best_seen, value);
    run.trace.entries.push_back({total_evals, BitString::from_mask(argmax, n), value,
                                 best_seen});
  };

  QaoaParams previous_best;
  for (int p = 1; p <= options.p_max; ++p) {
    std::vector<QaoaParams> starts;
    if (p == 1 || !options.warm_start || previous_best.layers() == 0) {
      // Repeated random initial values guard against local minima where no
      // warm start is available yet.
      std::uniform_real_distribution<double> gamma_dist(0.0, 2.0 * std::numbers::pi);
      std::uniform_real_distribution<double> beta_dist(0.0, std::numbers::pi);
      for (int repeat = 0; repeat < options.random_starts; ++repeat) {
        QaoaParams random_start;
        for (int l = 0; l < p; ++l) {
          random_start.gamma.push_back(gamma_dist(rng));
          random_start.beta.push_back(beta_dist(rng));
        }
        starts.push_back(std::move(random_start));
      }
    }
    if (p > 1 && options.warm_start && previous_best.layers() == p - 1)
      for (auto& s : warm_starts(previous_best, p)) starts.push_back(std::move(s));

    auto objective = [&](std::span<const double> x) {
      QaoaParams params;
      params.gamma.assign(x.begin(), x.begin() + p);
      params.beta.assign(x.begin() + p, x.end());
      return expectation(qaoa_state(energies, n, params), energies);
    };

    QaoaParams best_params;
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
      std::vector<double> x0 = start.gamma;
      x0.insert(x0.end(), start.beta.begin(), start.beta.end());
      NelderMeadOptions nm;
      nm.max_evals = options.optimizer_budget;
      auto result = nelder_mead(objective, x0, nm);
      total_evals += result.evals;
      QaoaParams optimized;
      optimized.gamma.assign(result.x.begin(), result.x.begin() + p);
      optimized.beta.assign(result.x.begin() + p, result.x.end());
      record(qaoa_state(energies, n, optimized), result.fx);
      if (result.fx < best_value) {
        best_value = result.fx;
        best_params = std::move(optimized);
      }
    }

    QaoaLayerResult layer;
    layer.params = best_params;
    layer.expectation = best_value;
    const auto state = qaoa_state(energies, n, best_params);
    layer.shots = sample(state, options.shots, derive_seed(options.seed, 1000 + p));
    layer.ratio_sampled = approximation_ratio(instance, layer.shots, exact);
    layer.ratio_exact = distribution_ratio(state, energies, exact);
    run.per_layer.push_back(std::move(layer));
    previous_best = best_params;
  }
  return run;
}

VqeResult optimize_vqe(const qubo::QuboInstance& instance,
                       const qubo::ExactSolution& exact, const VqeOptions& options) {
  const int n = instance.dimension();
  const auto energies = energies_for(instance);
  if (options.layers < 0) throw std::invalid_argument("layers must be >= 0");
  const std::size_t dim = static_cast<std::size_t>(n) * (options.layers + 1);

  auto objective = [&](std::span<const double> x) {
    VqeAnsatz ansatz{options.layers, {x.begin(), x.end()}};
    return expectation(vqe_state(ansatz, n), energies);
  };

  auto rng = make_rng(options.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

  VqeResult best;
  best.expectation = std::numeric_limits<double>::infinity();
  constexpr int kStarts = 3;
  for (int s = 0; s < kStarts; ++s) {
    std::vector<double> x0(dim);
    for (auto& t : x0) t = angle(rng);
    NelderMeadOptions nm;
    nm.max_evals = options.optimizer_budget;
    nm.init_step = 0.6;
    auto result = nelder_mead(objective, x0, nm);
    if (result.fx < best.expectation) {
      best.expectation = result.fx;
      best.ansatz = {options.layers, std::move(result.x)};
    }
  }

  const auto state = vqe_state(best.ansatz, n);
  best.shots = sample(state, options.shots, derive_seed(options.seed, 0xfe));
  best.ratio_sampled = approximation_ratio(instance, best.shots, exact);
  best.ratio_exact = distribution_ratio(state, energies, exact);
  return best;
}

}  // namespace qubofs::quantum
