#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnmr/bayesnet.hpp"
#include "bnmr/dataset.hpp"
#include "bnmr/diffcore.hpp"
#include "bnmr/fairmetrics.hpp"
#include "bnmr/fairness_loss.hpp"
#include "bnmr/inference.hpp"
#include "bnmr/rng.hpp"

namespace bnmr::meta {

enum class Mode { kBnmr, kVanilla, kRandom };

std::string mode_name(Mode mode);
Mode parse_mode(const std::string& name);

struct Ablations {
  bool no_normalization = false;
  bool no_online_update = false;
  bool no_calibration = false;
  bool no_reweighting = false;
};

struct TrainConfig {
  std::size_t batch_size = 16;
  double learning_rate = 1e-4;
  double meta_learning_rate = 1e-2;
  double temperature = 0.9;
  std::size_t bn_update_interval = 50;
  double bn_prior_strength = 80.0;
  std::size_t fairness_val_size = 20;  // both sides together
  std::size_t epochs = 1;
  fair::Norm norm = fair::Norm::kL1;
  Mode mode = Mode::kBnmr;
  Ablations ablations;
  std::uint64_t seed = 0;

  std::vector<std::size_t> hidden_dims{16};
  /// Sensitive attributes the fairness loss and the network cover.
  std::vector<std::string> attributes;
  /// Held-out attribute reported as demographic fairness only.
  std::optional<std::string> demographic;
  bool resample_micro_sets_per_epoch = false;
  double prune_alpha = 0.05;
  double bn_pseudocount = 1.0;
  double dirichlet_concentration = 1.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool reweights() const { return mode == Mode::kBnmr && !ablations.no_reweighting; }
  bool calibrates() const { return reweights() && !ablations.no_calibration; }
  bool updates_online() const { return calibrates() && !ablations.no_online_update; }
};

struct StepDiagnostics {
  double task_loss = 0.0;  // unweighted batch mean
  double fair_loss = 0.0;  // at the lookahead parameters (0 when not reweighting)
  std::vector<double> weights;
  std::vector<double> meta_gradient;
};

struct TrainState {
  nn::ClassifierParams params;
  std::optional<bayes::BayesianNetwork> network;
  std::vector<bayes::PredictionObservation> buffer;
  std::size_t step = 0;
  /// Z pairs aligned with the micro sets; refreshed whenever the network changes.
  std::vector<bayes::CalibrationPair> calibration;
  StepDiagnostics last;
};

/// Read-only inputs shared by every step of a run.
struct StepContext {
  const data::Dataset* train = nullptr;
  const data::Dataset* validation = nullptr;
  std::span<const fair::MicroValidationSet> micro_sets;
  /// Columns of cfg.attributes in the training set (network node order).
  std::vector<std::size_t> attribute_columns;
  /// Used by Mode::kRandom only.
  Rng* dirichlet_rng = nullptr;
};

/// One training step on the rows `batch` of ctx.train. For BNMR: uniform
/// weights, lookahead, fairness loss at the lookahead, one meta step on the
/// weight logits, renormalization, the committed weighted SGD step, and the
/// periodic prediction-node update.
TrainState bnmr_train_step(TrainState state, std::span<const std::size_t> batch, const StepContext& ctx,
                           const TrainConfig& cfg);

/// Initial network for a run: exhaustive K2 search on the training
/// attributes, chi-square pruning, smoothed MLE CPTs, uniform prediction node.
bayes::BayesianNetwork build_calibration_network(const data::Dataset& train, const TrainConfig& cfg);

struct HistoryRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double accuracy = 0.0;
  double mean_tprd = 0.0;
  double mean_dig = 0.0;
  double fair_loss = 0.0;
  double task_loss = 0.0;
};

struct TrainResult {
  nn::ClassifierParams params;
  fair::FairnessReport report;
  std::vector<HistoryRow> history;
  std::size_t best_epoch = 0;
  std::optional<bayes::BayesianNetwork> network;
};

/// Full run: epochs of steps, checkpoint with the highest validation
/// accuracy, final report on the test set.
TrainResult train(const TrainConfig& cfg, const data::Dataset& train_set, const data::Dataset& val_set,
                  const data::Dataset& test_set);

/// epoch,step,accuracy,mean_tprd,mean_dig,fair_loss,task_loss
std::string history_to_csv(const std::vector<HistoryRow>& history);

}  // namespace bnmr::meta
