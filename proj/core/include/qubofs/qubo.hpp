#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qubofs/bitstring.hpp"
#include "qubofs/measures.hpp"

namespace qubofs::qubo {

struct Provenance {
  std::string dataset_id;
  std::optional<measures::DependencyTuple> tuple;
};

/// Symmetric QUBO matrix for h(z) = -z^T Q z with
///   q_ii = phi * |rho_{i,Y}|,   q_ij = -(1-phi) * |rho_{i,j}|  (i != j).
/// The off-diagonal mass is split evenly between (i,j) and (j,i), so the
/// double sum over ordered pairs counts every unordered pair twice.
class QuboInstance {
 public:
  QuboInstance(Eigen::MatrixXd q, double phi, Provenance provenance = {});

  int dimension() const { return static_cast<int>(q_.rows()); }
  double phi() const { return phi_; }
  const Eigen::MatrixXd& q() const { return q_; }
  const Provenance& provenance() const { return prov_; }

  /// h(z) = -z^T Q z, evaluated as the explicit double sum in row-major
  /// order. This summation order is the canonical one: the exact solver
  /// re-evaluates candidates through it so that results are bit-identical
  /// with a from-scratch enumeration.
  double evaluate(const BitString& z) const;
  double evaluate_mask(std::uint64_t mask) const;

 private:
  Eigen::MatrixXd q_;
  double phi_;
  Provenance prov_;
};

QuboInstance build(const measures::DependencyMatrices& matrices, double phi,
                   std::string dataset_id = {});

/// Spin form of the same objective under z_i = (1+s_i)/2:
///   energy(s) = sum_{i<j} J_ij s_i s_j + sum_i f_i s_i + c  ==  h(z(s)).
/// The substitution necessarily produces the field vector f and constant c;
/// dropping them would shift the spectrum.
struct IsingInstance {
  Eigen::MatrixXd couplings;  // symmetric, zero diagonal
  Eigen::VectorXd fields;
  double offset = 0.0;

  double energy(std::span<const int> spins) const;  // spins in {-1,+1}
};

IsingInstance to_ising(const QuboInstance& instance);

struct ExactSolution {
  BitString z_min;
  double h_min = 0.0;
  BitString z_max;
  double h_max = 0.0;
};

inline constexpr int kExactDimensionLimit = 30;

/// Global minimum and maximum of h over all 2^n bit-strings via Gray-code
/// enumeration with O(n) incremental updates. Ties break toward smaller
/// popcount, then the lexicographically smallest string. Refuses n > 30.
ExactSolution exact_minmax(const QuboInstance& instance);

/// h(z_k) for every basis index k (bit i of k = z_i). The sweep is
/// incremental with periodic from-scratch re-anchoring to bound drift.
/// Requires n <= 26 (table of 2^n doubles).
std::vector<double> energy_table(const QuboInstance& instance);

/// Mean over samples of (h(z) - h_max) / (h_min - h_max). 1 at the optimum,
/// 0 at the worst bit-string. Throws on a flat objective (h_max == h_min).
double approximation_ratio(const QuboInstance& instance,
                           std::span<const BitString> samples,
                           const ExactSolution& exact);

/// Weighted variant for shot histograms (mask -> count).
double approximation_ratio(const QuboInstance& instance,
                           const std::map<std::uint64_t, int>& counts,
                           const ExactSolution& exact);

/// Mean approximation ratio of `count` uniform random bit-strings
/// (each bit an independent fair coin). Deterministic given the seed.
double random_baseline(const QuboInstance& instance, int count,
                       std::uint64_t seed, const ExactSolution& exact);

}  // namespace qubofs::qubo
