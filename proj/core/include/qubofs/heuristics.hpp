#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qubofs/bitstring.hpp"
#include "qubofs/qubo.hpp"
#include "qubofs/rng.hpp"

namespace qubofs::heuristics {

enum class Algorithm { rs, grs, ea, saea, ueda, dcma };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

enum class MutationOp { bit_flip = 1, block_inversion = 2, cycle = 3 };
enum class RecombinationOp { one_point = 1, two_point = 2, uniform = 3 };

struct SolverConfig {
  Algorithm algorithm = Algorithm::rs;
  int mu = 20;                 // population size (EA/SAEA/UEDA/DCMA)
  double r_m = 0.05;           // EA mutation rate
  MutationOp o_m = MutationOp::bit_flip;
  RecombinationOp o_r = RecombinationOp::uniform;
  double tau = 0.1;            // SAEA/UEDA learning rate
  double p_r = 0.3;            // SAEA operator re-draw probability
  double sigma_init = 1.0;     // DCMA initial step size
  double alpha_margin = 0.0;   // DCMA margin; <= 0 selects the (mu*n)^-1 default
  int budget = 5000;           // max objective function evaluations
  std::uint64_t seed = 0;
};

struct TraceEntry {
  int ofe = 0;  // 1-based evaluation index
  BitString candidate;
  double objective = 0.0;
  double cumulative_best = 0.0;
};

enum class TerminationReason { budget };

struct SolverTrace {
  std::vector<TraceEntry> entries;
  SolverConfig config;
  TerminationReason reason = TerminationReason::budget;

  double final_best() const { return entries.back().cumulative_best; }
  double best_at(int ofe) const;  // cumulative best after `ofe` evaluations
};

/// Shared initialization: n_bit ~ Uniform{1..n}, then a uniformly random
/// bit-string with exactly n_bit ones. Never produces the empty selection.
BitString init_candidate(int n, Rng& rng);

// Variation operators. `count` bits are changed: the number of flips, the
// block length, or the cyclic shift distance.
void mutate_bit_flip(BitString& z, int count, Rng& rng);
void mutate_block_inversion(BitString& z, int count, Rng& rng);
void mutate_cycle(BitString& z, int count, Rng& rng);
void mutate(BitString& z, MutationOp op, int count, Rng& rng);

/// Bits changed per mutation at rate r_m: max(1, round(r_m * n)).
int mutation_count(double r_m, int n);

BitString recombine(const BitString& a, const BitString& b, RecombinationOp op,
                    Rng& rng);

/// PBIL-style probability update with the [1/n, 1-1/n] clamp.
double ueda_update(double p, double p_star, double tau, int n);

/// Log-normal self-adaptation of the SAEA mutation rate, clamped to [1/n, 1].
double saea_mutate_rate(double theta1, double tau, int n, Rng& rng);

SolverTrace run_random_search(const qubo::QuboInstance&, const SolverConfig&);
SolverTrace run_greedy_restart(const qubo::QuboInstance&, const SolverConfig&);
SolverTrace run_ea(const qubo::QuboInstance&, const SolverConfig&);
SolverTrace run_saea(const qubo::QuboInstance&, const SolverConfig&);
SolverTrace run_ueda(const qubo::QuboInstance&, const SolverConfig&);
SolverTrace run_dcma(const qubo::QuboInstance&, const SolverConfig&);

/// Dispatch on config.algorithm.
SolverTrace run(const qubo::QuboInstance&, const SolverConfig&);

void write_trace_csv(const SolverTrace& trace, const std::string& path);

}  // namespace qubofs::heuristics
