#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bnmr/dataset.hpp"
#include "bnmr/kv_config.hpp"
#include "bnmr/trainer.hpp"

namespace bnmr::cli {

/// A mode token in train.modes: a training mode, optionally with one ablation.
struct RunMode {
  std::string name;  // vanilla, random, bnmr, no_normalization, ...
  meta::Mode mode = meta::Mode::kBnmr;
  meta::Ablations ablations;
};

RunMode parse_run_mode(const std::string& token);

enum class DataSource { kSynthetic, kCsv, kCelebA };

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::filesystem::path spec;  // synthetic generator spec
  std::size_t train_rows = 20000;
  std::size_t val_rows = 2000;
  std::size_t test_rows = 2000;
  std::optional<std::uint64_t> seed;  // fixed data across run seeds when set

  std::filesystem::path path;  // dataset CSV or annotation table
  std::optional<std::filesystem::path> partition;
  std::vector<double> split{0.8, 0.1, 0.1};
  std::string target;  // annotation tables only
  std::optional<std::vector<std::string>> features;
  /// Columns kept as attributes when reading an annotation table.
  std::vector<std::string> attributes;
};

struct ExperimentConfig {
  DataConfig data;
  meta::TrainConfig train;  // attributes/demographic live here
  std::vector<RunMode> modes;
  std::vector<std::uint64_t> seeds{0};
  bool parallel = false;
};

ExperimentConfig experiment_from_config(const KvConfig& cfg);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Train/val/test for one seed.
data::Splits load_splits(const DataConfig& cfg, std::uint64_t seed);

struct RunResult {
  std::string mode;
  std::uint64_t seed = 0;
  meta::TrainResult result;
};

/// train() for every (mode, seed), mode-major, seeds in order. Errors are
/// rethrown with the mode and seed prefixed.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

/// Scalar metrics of a report, in a stable order.
std::vector<std::pair<std::string, double>> report_metrics(const fair::FairnessReport& report);

/// <mode>.runs, <mode>.<metric>.mean and <mode>.<metric>.std (sample std,
/// 0 for one run) for each mode in run order.
std::string aggregate_to_text(const std::vector<RunResult>& runs);

/// Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

/// report_<mode>_<seed>.txt, history_<mode>_<seed>.csv and aggregate.txt.
void write_experiment_outputs(const std::vector<RunResult>& runs, const std::filesystem::path& out_dir);

}  // namespace bnmr::cli
