#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "recdec/dataset.hpp"
#include "recdec/decoder.hpp"
#include "recdec/metrics.hpp"
#include "recdec/synthetic.hpp"

namespace recdec {

/// One point of the strategy grid: a strategy plus its parameters and an
/// optional assistant group mask (the distribution-adjustment experiment).
struct GridCell {
  Strategy strategy = Strategy::baseline;
  double alpha = 1.0;
  double lambda = 1.0;
  double temperature = 1.0;
  std::optional<std::string> mask_category;
};

struct ExperimentConfig {
  // Dataset: either a synthetic spec or catalog/interactions paths.
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::string> catalog_path;
  std::optional<std::string> interactions_path;
  std::string dataset_name = "dataset";

  SplitConfig split;
  std::string eval_split = "test";  // "test" or "valid"

  std::string assistant = "markov";  // "markov" or "popularity"
  std::string scorer_kind = "copy_lm";  // "copy_lm" or "table"
  std::optional<std::string> scorer_table_path;
  double copy_bonus = 2.0;

  int beam_width = 10;
  int expansion_width = 10;
  int top_k = 10;  // recommendations kept per case for metrics
  int max_steps = 0;
  FusionMode fusion_mode = FusionMode::per_step;
  std::uint64_t seed = 0;

  std::vector<GridCell> grid;
  std::string out_dir = "out";

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;  // canonical form; hashed for traceability
};

ExperimentConfig load_experiment_config(const std::string& path);

struct CellResult {
  GridCell cell;
  MetricsReport report;
  std::optional<double> hr10_in_group;  // HR@10 over users whose target is in the mask
  int cases = 0;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::string csv_path;
  std::string summary_path;
  std::uint64_t config_hash = 0;
  std::uint64_t catalog_fingerprint = 0;
};

/// Decode every evaluation case for every grid cell, write one CSV row per
/// cell plus a JSON summary. Reruns with the same config and seed produce
/// byte-identical files.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::uint64_t fnv1a_hash(const std::string& data);

/// Fixed CSV schema (header row).
extern const char* kCsvHeader;

}  // namespace recdec
