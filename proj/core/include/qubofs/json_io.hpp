#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "qubofs/harness.hpp"
#include "qubofs/measures.hpp"
#include "qubofs/quantum.hpp"
#include "qubofs/qubo.hpp"

namespace qubofs::json_io {

using nlohmann::json;

// Dependency matrices: {"tuple": "...", "inter_feature": [[...]], "to_target": [...]}
json to_json(const measures::DependencyMatrices& matrices);
measures::DependencyMatrices matrices_from_json(const json& j);

// QUBO instance: {"phi": ..., "q": [[...]], "provenance": {...}}
json to_json(const qubo::QuboInstance& instance);
qubo::QuboInstance instance_from_json(const json& j);

json to_json(const qubo::ExactSolution& exact);
qubo::ExactSolution exact_from_json(const json& j);

json to_json(const heuristics::SolverConfig& config);
heuristics::SolverConfig config_from_json(const json& j);

/// Per-layer angles, expectation, approximation ratios, and the ten most
/// frequent sampled bit-strings.
json to_json(const quantum::QaoaRun& run, int n_qubits);
json to_json(const quantum::VqeResult& result, int n_qubits);

json to_json(const harness::TuningResult& result);
json to_json(const harness::ValidationResult& result);
harness::ValidationResult validation_from_json(const json& j);

json dataset_summary(const data::Dataset& dataset, int rows_dropped = 0);

json load_file(const std::string& path);
void save_file(const json& j, const std::string& path);

}  // namespace qubofs::json_io
