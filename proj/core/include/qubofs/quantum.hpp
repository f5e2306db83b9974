#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qubofs/heuristics.hpp"
#include "qubofs/qubo.hpp"

namespace qubofs::quantum {

inline constexpr int kMaxQubits = 24;

struct QaoaParams {
  std::vector<double> gamma;
  std::vector<double> beta;

  int layers() const { return static_cast<int>(gamma.size()); }
};

/// Dense 2^n-amplitude state. Basis index k encodes the bit-string with
/// z_i = bit i of k.
struct StateVector {
  std::vector<std::complex<double>> amplitudes;
  int n_qubits = 0;

  double norm() const;
};

struct ShotResult {
  std::map<std::uint64_t, int> counts;  // basis index -> count
  int shots = 0;
};

/// Real-amplitudes ansatz: L x [Ry layer, chain CNOT layer] followed by a
/// final Ry layer; n*(L+1) angles.
struct VqeAnsatz {
  int layers = 0;
  std::vector<double> thetas;
};

StateVector uniform_state(int n_qubits);

/// |psi> = U(beta_p) e^{-i gamma_p F} ... U(beta_1) e^{-i gamma_1 F} |+>^n
/// with F diagonal (phases from the instance energies) and the standard
/// X mixer applied as n independent single-qubit rotations.
StateVector qaoa_state(const qubo::QuboInstance& instance, const QaoaParams& params);

/// Same, with precomputed energies (avoids rebuilding the table per call).
StateVector qaoa_state(const std::vector<double>& energies, int n_qubits,
                       const QaoaParams& params);

StateVector vqe_state(const VqeAnsatz& ansatz, int n_qubits);

/// Exact <psi| F |psi> = sum_k |a_k|^2 h(z_k); no sampling involved.
double expectation(const StateVector& state, const qubo::QuboInstance& instance);
double expectation(const StateVector& state, const std::vector<double>& energies);

ShotResult sample(const StateVector& state, int shots, std::uint64_t seed);

double approximation_ratio(const qubo::QuboInstance& instance, const ShotResult& shots,
                           const qubo::ExactSolution& exact);

/// AR of the exact output distribution (the shots -> infinity limit).
double distribution_ratio(const StateVector& state, const std::vector<double>& energies,
                          const qubo::ExactSolution& exact);

struct QaoaOptions {
  int p_max = 3;
  int shots = 8192;
  bool warm_start = true;     // layer-wise heuristic starts (extrapolation,
                              // linear fit, quadratic fit, appended zeros)
  int random_starts = 3;      // repeated random initial values where no warm
                              // start exists (p = 1, or warm starts disabled)
  int optimizer_budget = 2000;  // expectation evaluations per local search
  std::uint64_t seed = 0;
};

struct QaoaLayerResult {
  QaoaParams params;
  double expectation = 0.0;
  double ratio_sampled = 0.0;
  double ratio_exact = 0.0;
  ShotResult shots;
};

struct QaoaRun {
  std::vector<QaoaLayerResult> per_layer;  // index p-1
  heuristics::SolverTrace trace;           // one entry per optimized start
};

QaoaRun optimize_qaoa(const qubo::QuboInstance& instance,
                      const qubo::ExactSolution& exact, const QaoaOptions& options);

struct VqeOptions {
  int layers = 2;
  int shots = 8192;
  int optimizer_budget = 4000;
  std::uint64_t seed = 0;
};

struct VqeResult {
  VqeAnsatz ansatz;
  double expectation = 0.0;
  double ratio_sampled = 0.0;
  double ratio_exact = 0.0;
  ShotResult shots;
};

VqeResult optimize_vqe(const qubo::QuboInstance& instance,
                       const qubo::ExactSolution& exact, const VqeOptions& options);

}  // namespace qubofs::quantum
