#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qubofs/dataset.hpp"
#include "qubofs/heuristics.hpp"
#include "qubofs/measures.hpp"
#include "qubofs/mleval.hpp"
#include "qubofs/qubo.hpp"

namespace qubofs::harness {

/// Conventions that reproduce the reference study's model scores: features
/// scaled onto [0,1] and a unit-strength ridge on the logistic weights.
struct PipelineOptions {
  data::Scaling scaling = data::Scaling::minmax;
  double l2 = 1.0;
  int mi_bins = measures::kDefaultMiBins;
  int threads = 1;
};

struct PhiSweepRow {
  double phi = 0.0;
  BitString subset;
  double optimization_value = 0.0;
  mleval::ModelScore score;
};

/// Per phi: build the QUBO, solve it exactly, score the selected subset.
std::vector<PhiSweepRow> sweep_phi(const data::Dataset& dataset,
                                   const measures::DependencyTuple& tuple,
                                   std::span<const double> phi_grid,
                                   const PipelineOptions& options = {});

struct TupleRow {
  measures::DependencyTuple tuple;
  double optimization_value = 0.0;
  BitString subset;
  mleval::ModelScore score;
};

/// One row per dependency tuple (all 8 combinations) at a fixed phi.
std::vector<TupleRow> compare_tuples(const data::Dataset& dataset, double phi,
                                     const PipelineOptions& options = {});

struct TuningSpec {
  heuristics::Algorithm algorithm = heuristics::Algorithm::ea;
  int n_configs = 100;
  int runs_per_config = 10;
  int budget_per_run = 2000;
  std::uint64_t seed = 0;
};

struct TuningResult {
  heuristics::SolverConfig best_config;
  double performance = 0.0;  // median over runs of the per-run sum of cumulative minima
  double sd_all = 0.0;       // sd of that performance over all sampled configs
  std::vector<std::pair<heuristics::SolverConfig, double>> all_configs;
};

/// Draws a random configuration within the documented parameter bounds
/// (exponent-uniform where the bounds are powers of ten).
heuristics::SolverConfig sample_config(heuristics::Algorithm algorithm, int dimension,
                                       Rng& rng);

/// Performance of one configuration: median over `runs` independent runs of
/// the sum over OFE of the cumulative minimum (lower is better).
double score_config(const qubo::QuboInstance& instance,
                    heuristics::SolverConfig config, int runs, int budget,
                    std::uint64_t seed);

/// Uniform random search over configurations per the published protocol.
TuningResult tune(const qubo::QuboInstance& instance, const TuningSpec& spec,
                  int threads = 1);

struct GapCurvePoint {
  int ofe = 0;
  double p5 = 0.0, p50 = 0.0, p95 = 0.0;
};

struct ValidationAlgoResult {
  heuristics::Algorithm algorithm = heuristics::Algorithm::rs;
  std::vector<double> best_at_100;   // per run
  std::vector<double> best_at_end;   // per run, at the full budget
  std::vector<double> ar_last50;     // per run, AR over the final 50 evaluations
  int optimum_hits = 0;              // runs whose final best equals h_min
  std::vector<GapCurvePoint> gap_curve;  // optimum floored to the third digit
};

struct ValidationResult {
  std::vector<ValidationAlgoResult> per_algorithm;
  qubo::ExactSolution exact;
  int runs = 0;
  int budget = 0;
};

/// Runs every configured metaheuristic `runs` times and aggregates the
/// published summary statistics.
ValidationResult validate(
    const qubo::QuboInstance& instance,
    const std::map<heuristics::Algorithm, heuristics::SolverConfig>& configs,
    const qubo::ExactSolution& exact, int runs, int budget, std::uint64_t seed,
    int threads = 1);

/// Percentile with linear interpolation (q in [0,100]).
double percentile(std::vector<double> values, double q);

/// Fixed 6-significant-digit formatting shared by every report writer, so
/// identical inputs produce byte-identical files.
std::string format_number(double v);

struct ReportRow {
  std::string method;
  double auroc = 0.0;
  double accuracy = 0.0;
  int n_features = 0;
};

void write_report_csv(std::span<const ReportRow> rows, const std::string& path);
void write_tuple_rows_csv(std::span<const TupleRow> rows, const std::string& path);
void write_phi_sweep_csv(std::span<const PhiSweepRow> rows, const std::string& path);
void write_gap_curves_csv(const ValidationResult& result, const std::string& path);
void write_validation_summary_csv(const ValidationResult& result, const std::string& path);

}  // namespace qubofs::harness
