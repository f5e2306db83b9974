#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qubofs {

struct NelderMeadOptions {
  int max_evals = 4000;
  double f_tol = 1e-12;      // simplex spread below which a restart triggers
  double init_step = 0.4;    // initial simplex edge length
  int restarts = 2;          // re-seeded shrinking restarts on stagnation
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int evals = 0;
};

/// Derivative-free simplex minimizer with restart on stagnation. Restarts
/// rebuild the simplex around the incumbent with a smaller step.
NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& options = {});

}  // namespace qubofs
