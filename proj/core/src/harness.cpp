#include "qubofs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "qubofs/thread_pool.hpp"

namespace qubofs::harness {
namespace {

using heuristics::Algorithm;
using heuristics::SolverConfig;
using heuristics::SolverTrace;

mleval::FitOptions fit_options(const PipelineOptions& options) {
  mleval::FitOptions fit;
  fit.l2 = options.l2;
  fit.allow_empty = true;
  return fit;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

std::vector<PhiSweepRow> sweep_phi(const data::Dataset& dataset,
                                   const measures::DependencyTuple& tuple,
                                   std::span<const double> phi_grid,
                                   const PipelineOptions& options) {
  for (double phi : phi_grid)
    if (!(phi >= 0.0 && phi <= 1.0))
      throw std::invalid_argument("phi grid must lie within [0,1]");
  const data::Dataset scaled = data::apply_scaling(dataset, options.scaling);
  const auto matrices = measures::build_matrices(scaled, tuple, options.mi_bins);

  std::vector<PhiSweepRow> rows(phi_grid.size());
  parallel_for(static_cast<int>(phi_grid.size()), options.threads, [&](int i) {
    const double phi = phi_grid[static_cast<std::size_t>(i)];
    const auto instance = qubo::build(matrices, phi, scaled.id);
    const auto exact = qubo::exact_minmax(instance);
    PhiSweepRow row;
    row.phi = phi;
    row.subset = exact.z_min;
    row.optimization_value = exact.h_min;
    row.score = mleval::fit_and_score(scaled, exact.z_min, fit_options(options));
    rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  return rows;
}

std::vector<TupleRow> compare_tuples(const data::Dataset& dataset, double phi,
                                     const PipelineOptions& options) {
  if (dataset.n_features() > qubo::kExactDimensionLimit)
    throw std::invalid_argument("tuple comparison needs the exact solver (n <= 30)");
  const data::Dataset scaled = data::apply_scaling(dataset, options.scaling);

  std::vector<measures::DependencyTuple> tuples;
  for (auto f : {measures::FeatureMeasure::correl, measures::FeatureMeasure::mi})
    for (auto t : {measures::TargetMeasure::correl, measures::TargetMeasure::mi,
                   measures::TargetMeasure::roc, measures::TargetMeasure::anova})
      tuples.push_back({f, t});

  std::vector<TupleRow> rows(tuples.size());
  parallel_for(static_cast<int>(tuples.size()), options.threads, [&](int i) {
    const auto& tuple = tuples[static_cast<std::size_t>(i)];
    const auto matrices = measures::build_matrices(scaled, tuple, options.mi_bins);
    const auto instance = qubo::build(matrices, phi, scaled.id);
    const auto exact = qubo::exact_minmax(instance);
    TupleRow row;
    row.tuple = tuple;
    row.optimization_value = exact.h_min;
    row.subset = exact.z_min;
    row.score = mleval::fit_and_score(scaled, exact.z_min, fit_options(options));
    rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  return rows;
}

SolverConfig sample_config(Algorithm algorithm, int dimension, Rng& rng) {
  std::uniform_int_distribution<int> mu_range(4, 200);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> op_range(1, 3);

  SolverConfig config;
  config.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::ea:
      config.mu = mu_range(rng);
      config.r_m = unit(rng);
      config.o_m = static_cast<heuristics::MutationOp>(op_range(rng));
      config.o_r = static_cast<heuristics::RecombinationOp>(op_range(rng));
      break;
    case Algorithm::saea:
      config.mu = mu_range(rng);
      config.tau = std::pow(10.0, -4.0 + 4.0 * unit(rng));  // exponent-uniform
      config.p_r = unit(rng);
      break;
    case Algorithm::ueda:
      config.mu = mu_range(rng);
      config.tau = unit(rng);
      break;
    case Algorithm::dcma: {
      config.mu = mu_range(rng);
      config.sigma_init = std::pow(10.0, -4.0 + 8.0 * unit(rng));
      const double base = static_cast<double>(config.mu) * dimension;
      config.alpha_margin = std::pow(base, -1.5 + unit(rng));  // (mu*n)^U[-1.5,-0.5]
      break;
    }
    case Algorithm::rs:
    case Algorithm::grs:
      break;  // no tunable parameters
  }
  return config;
}

double score_config(const qubo::QuboInstance& instance, SolverConfig config,
                    int runs, int budget, std::uint64_t seed) {
  config.budget = budget;
  std::vector<double> sums(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    config.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const SolverTrace trace = heuristics::run(instance, config);
    double acc = 0.0;
    for (const auto& e : trace.entries) acc += e.cumulative_best;
    sums[static_cast<std::size_t>(r)] = acc;
  }
  return median(std::move(sums));
}

TuningResult tune(const qubo::QuboInstance& instance, const TuningSpec& spec,
                  int threads) {
  if (spec.n_configs < 1 || spec.runs_per_config < 1 || spec.budget_per_run < 1)
    throw std::invalid_argument("tuning spec counts must be positive");

  // Configs are drawn up front so the sampling stream is independent of the
  // evaluation schedule.
  std::vector<SolverConfig> configs(static_cast<std::size_t>(spec.n_configs));
  {
    auto rng = make_rng(spec.seed, 0xc0f);
    for (int c = 0; c < spec.n_configs; ++c)
      configs[static_cast<std::size_t>(c)] =
          sample_config(spec.algorithm, instance.dimension(), rng);
  }

  std::vector<double> performance(static_cast<std::size_t>(spec.n_configs));
  parallel_for(spec.n_configs, threads, [&](int c) {
    performance[static_cast<std::size_t>(c)] =
        score_config(instance, configs[static_cast<std::size_t>(c)],
                     spec.runs_per_config, spec.budget_per_run,
                     derive_seed(spec.seed, 1000 + static_cast<std::uint64_t>(c)));
  });

  TuningResult result;
  std::size_t best = 0;
  for (std::size_t c = 1; c < performance.size(); ++c)
    if (performance[c] < performance[best]) best = c;
  result.best_config = configs[best];
  result.performance = performance[best];

  const double mean =
      std::accumulate(performance.begin(), performance.end(), 0.0) / performance.size();
  double var = 0.0;
  for (double p : performance) var += (p - mean) * (p - mean);
  result.sd_all = performance.size() > 1
                      ? std::sqrt(var / (performance.size() - 1))
                      : 0.0;
  for (std::size_t c = 0; c < configs.size(); ++c)
    result.all_configs.emplace_back(configs[c], performance[c]);
  return result;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::sort(values.begin(), values.end());
  const double pos = (q / 100.0) * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - lo;
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

ValidationResult validate(
    const qubo::QuboInstance& instance,
    const std::map<Algorithm, SolverConfig>& configs,
    const qubo::ExactSolution& exact, int runs, int budget, std::uint64_t seed,
    int threads) {
  if (runs < 1 || budget < 1) throw std::invalid_argument("runs and budget must be >= 1");

  ValidationResult result;
  result.exact = exact;
  result.runs = runs;
  result.budget = budget;

  // Fig.-8-style floor: round the optimum down on the third digit so gaps
  // stay positive on a log scale.
  const double floored_min = std::floor(exact.h_min * 1000.0) / 1000.0;

  std::vector<std::pair<Algorithm, SolverConfig>> jobs(configs.begin(), configs.end());
  for (std::size_t job = 0; job < jobs.size(); ++job) {
    const auto& [algo, base_config] = jobs[job];
    std::vector<SolverTrace> traces(static_cast<std::size_t>(runs));
    parallel_for(runs, threads, [&](int r) {
      SolverConfig config = base_config;
      config.algorithm = algo;
      config.budget = budget;
      config.seed = derive_seed(seed, (job << 16) + static_cast<std::uint64_t>(r));
      traces[static_cast<std::size_t>(r)] = heuristics::run(instance, config);
    });

    ValidationAlgoResult algo_result;
    algo_result.algorithm = algo;
    for (const auto& trace : traces) {
      algo_result.best_at_100.push_back(trace.best_at(std::min(100, budget)));
      const double final_best = trace.best_at(budget);
      algo_result.best_at_end.push_back(final_best);
      if (final_best == exact.h_min) ++algo_result.optimum_hits;

      // AR over the last 50 evaluations, each observed candidate weighted equally.
      const int tail = std::min<int>(50, static_cast<int>(trace.entries.size()));
      double acc = 0.0;
      for (int i = 0; i < tail; ++i) {
        const auto& e = trace.entries[trace.entries.size() - tail + i];
        acc += (e.objective - exact.h_max) / (exact.h_min - exact.h_max);
      }
      algo_result.ar_last50.push_back(acc / tail);
    }

    for (int ofe = 1; ofe <= budget; ++ofe) {
      std::vector<double> gaps;
      gaps.reserve(static_cast<std::size_t>(runs));
      for (const auto& trace : traces)
        gaps.push_back(trace.best_at(ofe) - floored_min);
      GapCurvePoint point;
      point.ofe = ofe;
      point.p5 = percentile(gaps, 5.0);
      point.p50 = percentile(gaps, 50.0);
      point.p95 = percentile(gaps, 95.0);
      algo_result.gap_curve.push_back(point);
    }
    result.per_algorithm.push_back(std::move(algo_result));
  }
  return result;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

std::ofstream open_report(const std::string& path, bool empty) {
  if (empty) throw std::invalid_argument("nothing to report");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_report_csv(std::span<const ReportRow> rows, const std::string& path) {
  auto out = open_report(path, rows.empty());
  out << "method,auroc,accuracy,n_features\n";
  for (const auto& r : rows)
    out << r.method << ',' << format_number(r.auroc) << ','
        << format_number(r.accuracy) << ',' << r.n_features << '\n';
}

void write_tuple_rows_csv(std::span<const TupleRow> rows, const std::string& path) {
  auto out = open_report(path, rows.empty());
  out << "feature_measure,target_measure,optimization_value,auroc,accuracy,n_features\n";
  for (const auto& r : rows)
    out << measures::to_string(r.tuple.feature) << ','
        << measures::to_string(r.tuple.target) << ','
        << format_number(r.optimization_value) << ',' << format_number(r.score.auroc)
        << ',' << format_number(r.score.accuracy) << ',' << r.score.n_selected << '\n';
}

void write_phi_sweep_csv(std::span<const PhiSweepRow> rows, const std::string& path) {
  auto out = open_report(path, rows.empty());
  out << "phi,optimization_value,auroc,accuracy,n_features,subset\n";
  for (const auto& r : rows)
    out << format_number(r.phi) << ',' << format_number(r.optimization_value) << ','
        << format_number(r.score.auroc) << ',' << format_number(r.score.accuracy)
        << ',' << r.score.n_selected << ',' << r.subset.to_string() << '\n';
}

void write_gap_curves_csv(const ValidationResult& result, const std::string& path) {
  auto out = open_report(path, result.per_algorithm.empty());
  out << "algorithm,ofe,p5,p50,p95\n";
  for (const auto& algo : result.per_algorithm)
    for (const auto& p : algo.gap_curve)
      out << heuristics::to_string(algo.algorithm) << ',' << p.ofe << ','
          << format_number(p.p5) << ',' << format_number(p.p50) << ','
          << format_number(p.p95) << '\n';
}

void write_validation_summary_csv(const ValidationResult& result,
                                  const std::string& path) {
  auto out = open_report(path, result.per_algorithm.empty());
  out << "algorithm,run,best_at_100,best_at_end,ar_last50,optimum_hit\n";
  for (const auto& algo : result.per_algorithm)
    for (std::size_t r = 0; r < algo.best_at_end.size(); ++r)
      out << heuristics::to_string(algo.algorithm) << ',' << (r + 1) << ','
          << format_number(algo.best_at_100[r]) << ','
          << format_number(algo.best_at_end[r]) << ','
          << format_number(algo.ar_last50[r]) << ','
          << (algo.best_at_end[r] == result.exact.h_min ? 1 : 0) << '\n';
}

}  // namespace qubofs::harness
