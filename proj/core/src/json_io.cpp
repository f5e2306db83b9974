#include "qubofs/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace qubofs::json_io {
namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  if (rows == 0) throw std::invalid_argument("empty matrix");
  const int cols = static_cast<int>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols)
      throw std::invalid_argument("ragged matrix");
    for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

}  // namespace

json to_json(const measures::DependencyMatrices& matrices) {
  json vec = json::array();
  for (int i = 0; i < matrices.to_target.size(); ++i) vec.push_back(matrices.to_target(i));
  return json{{"tuple", measures::to_string(matrices.tuple)},
              {"inter_feature", matrix_to_json(matrices.inter_feature)},
              {"to_target", std::move(vec)}};
}

measures::DependencyMatrices matrices_from_json(const json& j) {
  measures::DependencyMatrices m;
  m.tuple = measures::parse_tuple(j.at("tuple").get<std::string>());
  m.inter_feature = matrix_from_json(j.at("inter_feature"));
  const auto& vec = j.at("to_target");
  m.to_target.resize(static_cast<int>(vec.size()));
  for (int i = 0; i < m.to_target.size(); ++i) m.to_target(i) = vec.at(i).get<double>();
  return m;
}

json to_json(const qubo::QuboInstance& instance) {
  json provenance{{"dataset_id", instance.provenance().dataset_id}};
  if (instance.provenance().tuple)
    provenance["tuple"] = measures::to_string(*instance.provenance().tuple);
  return json{{"phi", instance.phi()},
              {"q", matrix_to_json(instance.q())},
              {"provenance", std::move(provenance)}};
}

qubo::QuboInstance instance_from_json(const json& j) {
  qubo::Provenance prov;
  if (j.contains("provenance")) {
    const auto& p = j.at("provenance");
    if (p.contains("dataset_id")) prov.dataset_id = p.at("dataset_id").get<std::string>();
    if (p.contains("tuple"))
      prov.tuple = measures::parse_tuple(p.at("tuple").get<std::string>());
  }
  return qubo::QuboInstance(matrix_from_json(j.at("q")), j.at("phi").get<double>(),
                            std::move(prov));
}

json to_json(const qubo::ExactSolution& exact) {
  return json{{"z_min", exact.z_min.to_string()},
              {"h_min", exact.h_min},
              {"z_max", exact.z_max.to_string()},
              {"h_max", exact.h_max}};
}

qubo::ExactSolution exact_from_json(const json& j) {
  qubo::ExactSolution exact;
  exact.z_min = BitString::parse(j.at("z_min").get<std::string>());
  exact.h_min = j.at("h_min").get<double>();
  exact.z_max = BitString::parse(j.at("z_max").get<std::string>());
  exact.h_max = j.at("h_max").get<double>();
  return exact;
}

json to_json(const heuristics::SolverConfig& config) {
  return json{{"algorithm", heuristics::to_string(config.algorithm)},
              {"mu", config.mu},
              {"r_m", config.r_m},
              {"o_m", static_cast<int>(config.o_m)},
              {"o_r", static_cast<int>(config.o_r)},
              {"tau", config.tau},
              {"p_r", config.p_r},
              {"sigma_init", config.sigma_init},
              {"alpha_margin", config.alpha_margin},
              {"budget", config.budget},
              {"seed", config.seed}};
}

heuristics::SolverConfig config_from_json(const json& j) {
  heuristics::SolverConfig config;
  config.algorithm = heuristics::parse_algorithm(j.at("algorithm").get<std::string>());
  if (j.contains("mu")) config.mu = j.at("mu").get<int>();
  if (j.contains("r_m")) config.r_m = j.at("r_m").get<double>();
  if (j.contains("o_m"))
    config.o_m = static_cast<heuristics::MutationOp>(j.at("o_m").get<int>());
  if (j.contains("o_r"))
    config.o_r = static_cast<heuristics::RecombinationOp>(j.at("o_r").get<int>());
  if (j.contains("tau")) config.tau = j.at("tau").get<double>();
  if (j.contains("p_r")) config.p_r = j.at("p_r").get<double>();
  if (j.contains("sigma_init")) config.sigma_init = j.at("sigma_init").get<double>();
  if (j.contains("alpha_margin")) config.alpha_margin = j.at("alpha_margin").get<double>();
  if (j.contains("budget")) config.budget = j.at("budget").get<int>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

namespace {

json top_counts(const quantum::ShotResult& shots, int n_qubits, std::size_t limit) {
  std::vector<std::pair<std::uint64_t, int>> entries(shots.counts.begin(),
                                                     shots.counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (entries.size() > limit) entries.resize(limit);
  json out = json::array();
  for (const auto& [mask, count] : entries)
    out.push_back(json{{"bits", BitString::from_mask(mask, n_qubits).to_string()},
                       {"count", count}});
  return out;
}

}  // namespace

json to_json(const quantum::QaoaRun& run, int n_qubits) {
  json layers = json::array();
  for (std::size_t i = 0; i < run.per_layer.size(); ++i) {
    const auto& layer = run.per_layer[i];
    layers.push_back(json{{"p", i + 1},
                          {"gamma", layer.params.gamma},
                          {"beta", layer.params.beta},
                          {"expectation", layer.expectation},
                          {"approximation_ratio", layer.ratio_sampled},
                          {"approximation_ratio_exact", layer.ratio_exact},
                          {"top_bitstrings", top_counts(layer.shots, n_qubits, 10)}});
  }
  return json{{"layers", std::move(layers)}};
}

json to_json(const quantum::VqeResult& result, int n_qubits) {
  return json{{"layers", result.ansatz.layers},
              {"thetas", result.ansatz.thetas},
              {"expectation", result.expectation},
              {"approximation_ratio", result.ratio_sampled},
              {"approximation_ratio_exact", result.ratio_exact},
              {"top_bitstrings", top_counts(result.shots, n_qubits, 10)}};
}

json dataset_summary(const data::Dataset& dataset, int rows_dropped) {
  const int positives =
      std::accumulate(dataset.target.begin(), dataset.target.end(), 0);
  return json{{"n", dataset.n_features()},
              {"m", dataset.n_rows()},
              {"class_balance", static_cast<double>(positives) / dataset.n_rows()},
              {"rows_dropped", rows_dropped},
              {"columns", dataset.names},
              {"id", dataset.id}};
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void save_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace qubofs::json_io
