#include "qubofs/qubo.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "qubofs/rng.hpp"

namespace qubofs::qubo {
namespace {

constexpr double kSymmetryTol = 1e-12;

int popcount_u64(std::uint64_t v) { return std::popcount(v); }

// Lexicographic order on the bit sequence (z_0 first). The first differing
// position decides; the string with a 0 there is smaller.
bool lex_less(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t diff = a ^ b;
  if (diff == 0) return false;
  const int pos = std::countr_zero(diff);
  return ((a >> pos) & 1u) == 0;
}

// Candidate ordering used by the exact solver: objective first, then
// popcount, then lexicographic.
bool better_candidate(double h, std::uint64_t z, double best_h, std::uint64_t best_z) {
  if (h != best_h) return h < best_h;
  const int pa = popcount_u64(z), pb = popcount_u64(best_z);
  if (pa != pb) return pa < pb;
  return lex_less(z, best_z);
}

}  // namespace

QuboInstance::QuboInstance(Eigen::MatrixXd q, double phi, Provenance provenance)
    : q_(std::move(q)), phi_(phi), prov_(std::move(provenance)) {
  if (q_.rows() != q_.cols()) throw std::invalid_argument("Q must be square");
  if (q_.rows() < 1) throw std::invalid_argument("Q must be non-empty");
  if (!(phi >= 0.0 && phi <= 1.0))
    throw std::invalid_argument("phi must lie in [0,1]");
  for (int i = 0; i < q_.rows(); ++i)
    for (int j = i + 1; j < q_.cols(); ++j)
      if (std::abs(q_(i, j) - q_(j, i)) > kSymmetryTol)
        throw std::invalid_argument("Q must be symmetric");
}

double QuboInstance::evaluate(const BitString& z) const {
  if (static_cast<int>(z.size()) != dimension())
    throw std::invalid_argument("bit-string dimension mismatch");
  return evaluate_mask(z.to_mask());
}

double QuboInstance::evaluate_mask(std::uint64_t mask) const {
  const int n = dimension();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (((mask >> i) & 1u) == 0) continue;
    for (int j = 0; j < n; ++j)
      if ((mask >> j) & 1u) acc += q_(i, j);
  }
  return -acc;
}

QuboInstance build(const measures::DependencyMatrices& matrices, double phi,
                   std::string dataset_id) {
  if (!(phi >= 0.0 && phi <= 1.0))
    throw std::invalid_argument("phi must lie in [0,1]");
  const int n = static_cast<int>(matrices.to_target.size());
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = phi * matrices.to_target(i);
    for (int j = 0; j < n; ++j)
      if (i != j) q(i, j) = -(1.0 - phi) * matrices.inter_feature(i, j);
  }
  return QuboInstance(std::move(q), phi,
                      Provenance{std::move(dataset_id), matrices.tuple});
}

double IsingInstance::energy(std::span<const int> spins) const {
  const int n = static_cast<int>(fields.size());
  if (static_cast<int>(spins.size()) != n)
    throw std::invalid_argument("spin vector dimension mismatch");
  double e = offset;
  for (int i = 0; i < n; ++i) {
    e += fields(i) * spins[i];
    for (int j = i + 1; j < n; ++j) e += couplings(i, j) * spins[i] * spins[j];
  }
  return e;
}

IsingInstance to_ising(const QuboInstance& instance) {
  const auto& q = instance.q();
  const int n = instance.dimension();
  IsingInstance out;
  out.couplings = Eigen::MatrixXd::Zero(n, n);
  out.fields = Eigen::VectorXd::Zero(n);
  // h(z) = -z^T Q z with z = (1+s)/2:
  //   J_ij = -Q_ij/2 (i<j),  f_i = -(row sum)_i / 2,  c = -(sum Q + tr Q)/4.
  double total = 0.0, trace = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      row += q(i, j);
      total += q(i, j);
      if (i != j) out.couplings(i, j) = -0.5 * q(i, j);
    }
    out.fields(i) = -0.5 * row;
    trace += q(i, i);
  }
  out.offset = -0.25 * (total + trace);
  return out;
}

ExactSolution exact_minmax(const QuboInstance& instance) {
  const int n = instance.dimension();
  if (n > kExactDimensionLimit)
    throw std::invalid_argument(
        "exact enumeration refused: dimension " + std::to_string(n) + " exceeds " +
        std::to_string(kExactDimensionLimit));

  const auto& q = instance.q();
  // active(i) = sum_j Q_ij z_j, kept incrementally; flipping bit b costs one
  // column update. Toggling bit i changes z^T Q z by +-(Q_ii + 2*active_off)
  // where active_off excludes the i-term.
  Eigen::VectorXd active = Eigen::VectorXd::Zero(n);
  std::uint64_t z = 0;
  double value = 0.0;  // current h(z), incrementally maintained

  std::uint64_t best_min_z = 0, best_max_z = 0;
  double best_min = 0.0, best_max = 0.0;  // h(0) = 0 exactly

  const std::uint64_t total = std::uint64_t{1} << n;
  constexpr std::uint64_t kReanchor = 1u << 16;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int b = std::countr_zero(k);  // Gray code: bit flipped at step k
    const bool turning_on = ((z >> b) & 1u) == 0;
    const double self = q(b, b);
    const double cross = active(b) - (turning_on ? 0.0 : self);
    const double delta_quad = turning_on ? (self + 2.0 * cross) : -(self + 2.0 * cross);
    value -= delta_quad;
    if (turning_on) {
      active += q.col(b);
      z |= (std::uint64_t{1} << b);
    } else {
      active -= q.col(b);
      z &= ~(std::uint64_t{1} << b);
    }
    if ((k & (kReanchor - 1)) == 0) {
      value = instance.evaluate_mask(z);
      active.setZero();
      for (int j = 0; j < n; ++j)
        if ((z >> j) & 1u) active += q.col(j);
    }

    // Near either incumbent, switch to the canonical from-scratch value so
    // comparisons and tie rules work on exact doubles.
    const double slack_min = 1e-6 * (1.0 + std::abs(best_min));
    if (value <= best_min + slack_min) {
      const double exact = instance.evaluate_mask(z);
      if (better_candidate(exact, z, best_min, best_min_z)) {
        best_min = exact;
        best_min_z = z;
      }
    }
    const double slack_max = 1e-6 * (1.0 + std::abs(best_max));
    if (value >= best_max - slack_max) {
      const double exact = instance.evaluate_mask(z);
      if (better_candidate(-exact, z, -best_max, best_max_z)) {
        best_max = exact;
        best_max_z = z;
      }
    }
  }

  ExactSolution out;
  out.z_min = BitString::from_mask(best_min_z, n);
  out.h_min = best_min;
  out.z_max = BitString::from_mask(best_max_z, n);
  out.h_max = best_max;
  return out;
}

std::vector<double> energy_table(const QuboInstance& instance) {
  const int n = instance.dimension();
  if (n > 26) throw std::invalid_argument("energy table limited to n <= 26");
  const auto& q = instance.q();
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> table(total);

  Eigen::VectorXd active = Eigen::VectorXd::Zero(n);
  std::uint64_t z = 0;
  double value = 0.0;
  table[0] = 0.0;
  constexpr std::uint64_t kReanchor = 1u << 16;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int b = std::countr_zero(k);
    const bool turning_on = ((z >> b) & 1u) == 0;
    const double self = q(b, b);
    const double cross = active(b) - (turning_on ? 0.0 : self);
    value -= turning_on ? (self + 2.0 * cross) : -(self + 2.0 * cross);
    if (turning_on) {
      active += q.col(b);
      z |= (std::uint64_t{1} << b);
    } else {
      active -= q.col(b);
      z &= ~(std::uint64_t{1} << b);
    }
    if ((k & (kReanchor - 1)) == 0) {
      value = instance.evaluate_mask(z);
      active = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j)
        if ((z >> j) & 1u) active += q.col(j);
    }
    table[z] = value;
  }
  return table;
}

namespace {

double ratio_one(double h, const ExactSolution& exact) {
  return (h - exact.h_max) / (exact.h_min - exact.h_max);
}

void require_not_flat(const ExactSolution& exact) {
  if (!(exact.h_max > exact.h_min))
    throw std::invalid_argument("flat objective: h_max must exceed h_min");
}

}  // namespace

double approximation_ratio(const QuboInstance& instance,
                           std::span<const BitString> samples,
                           const ExactSolution& exact) {
  require_not_flat(exact);
  if (samples.empty()) throw std::invalid_argument("no samples");
  double acc = 0.0;
  for (const auto& z : samples) acc += ratio_one(instance.evaluate(z), exact);
  return acc / static_cast<double>(samples.size());
}

double approximation_ratio(const QuboInstance& instance,
                           const std::map<std::uint64_t, int>& counts,
                           const ExactSolution& exact) {
  require_not_flat(exact);
  double acc = 0.0;
  long total = 0;
  for (const auto& [mask, c] : counts) {
    acc += c * ratio_one(instance.evaluate_mask(mask), exact);
    total += c;
  }
  if (total == 0) throw std::invalid_argument("no samples");
  return acc / static_cast<double>(total);
}

double random_baseline(const QuboInstance& instance, int count,
                       std::uint64_t seed, const ExactSolution& exact) {
  require_not_flat(exact);
  if (count < 1) throw std::invalid_argument("count must be positive");
  const int n = instance.dimension();
  auto rng = make_rng(seed);
  std::uniform_int_distribution<std::uint64_t> word;
  double acc = 0.0;
  const std::uint64_t mask_all = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t z = word(rng) & mask_all;
    acc += ratio_one(instance.evaluate_mask(z), exact);
  }
  return acc / count;
}

}  // namespace qubofs::qubo
