#include "qubofs/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qubofs {
namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) throw std::invalid_argument("empty start point");

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return objective(x);
  };

  std::vector<double> best_x(start.begin(), start.end());
  double best_f = eval(best_x);

  double step = options.init_step;
  for (int round = 0; round <= options.restarts && evals < options.max_evals; ++round) {
    // Axis-aligned simplex around the incumbent.
    std::vector<Vertex> simplex;
    simplex.push_back({best_x, best_f});
    for (std::size_t i = 0; i < dim && evals < options.max_evals; ++i) {
      std::vector<double> x = best_x;
      x[i] += step;
      simplex.push_back({x, eval(x)});
    }
    if (simplex.size() < dim + 1) break;

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;
    while (evals + 2 < options.max_evals) {
      std::sort(simplex.begin(), simplex.end(),
                [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      if (simplex.back().f - simplex.front().f < options.f_tol) break;

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t v = 0; v < dim; ++v)
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i] / dim;

      auto along = [&](double t) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i)
          x[i] = centroid[i] + t * (centroid[i] - simplex.back().x[i]);
        return x;
      };

      auto reflected = along(alpha);
      const double f_r = eval(reflected);
      if (f_r < simplex.front().f) {
        auto expanded = along(gamma);
        const double f_e = eval(expanded);
        simplex.back() = f_e < f_r ? Vertex{expanded, f_e} : Vertex{reflected, f_r};
      } else if (f_r < simplex[dim - 1].f) {
        simplex.back() = {reflected, f_r};
      } else {
        auto contracted = along(f_r < simplex.back().f ? rho : -rho);
        const double f_c = eval(contracted);
        if (f_c < std::min(f_r, simplex.back().f)) {
          simplex.back() = {contracted, f_c};
        } else {
          for (std::size_t v = 1; v < simplex.size(); ++v) {
            for (std::size_t i = 0; i < dim; ++i)
              simplex[v].x[i] =
                  simplex[0].x[i] + shrink * (simplex[v].x[i] - simplex[0].x[i]);
            if (evals >= options.max_evals) break;
            simplex[v].f = eval(simplex[v].x);
          }
        }
      }
    }

    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (simplex.front().f < best_f) {
      best_f = simplex.front().f;
      best_x = simplex.front().x;
    }
    step *= 0.25;
  }
  return {std::move(best_x), best_f, evals};
}

}  // namespace qubofs
