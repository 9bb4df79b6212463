#include "bnmr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bnmr/errors.hpp"
#include "bnmr/dag.hpp"
#include "bnmr/independence.hpp"
#include "bnmr/reweight.hpp"
#include "bnmr/strings.hpp"
#include "bnmr/structure.hpp"

namespace bnmr::meta {

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kBnmr: return "bnmr";
    case Mode::kVanilla: return "vanilla";
    case Mode::kRandom: return "random";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  if (name == "bnmr") return Mode::kBnmr;
  if (name == "vanilla") return Mode::kVanilla;
  if (name == "random") return Mode::kRandom;
  throw ConfigError("unknown training mode '" + name + "' (expected bnmr, vanilla or random)");
}

void TrainConfig::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("train.") + field + " must be positive");
  };
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  positive(learning_rate, "learning_rate");
  if (!(meta_learning_rate >= 0.0)) throw ConfigError("train.meta_learning_rate must be non-negative");
  positive(temperature, "temperature");
  if (bn_update_interval == 0) throw ConfigError("train.bn_update_interval must be positive");
  positive(bn_prior_strength, "bn_prior_strength");
  if (fairness_val_size < 2 || fairness_val_size % 2 != 0) {
    throw ConfigError("train.fairness_val_size must be a positive even number");
  }
  if (epochs == 0) throw ConfigError("train.epochs must be positive");
  positive(dirichlet_concentration, "dirichlet_concentration");
  if (attributes.empty()) throw ConfigError("at least one sensitive attribute is required");
  for (auto h : hidden_dims) {
    if (h == 0) throw ConfigError("train.hidden sizes must be positive");
  }
  if (calibrates() && attributes.size() > bayes::kMaxExhaustiveNodes) {
    throw CapacityError("exhaustive structure learning supports at most " +
                        std::to_string(bayes::kMaxExhaustiveNodes) + " attributes, got " +
                        std::to_string(attributes.size()));
  }
  if (demographic && std::find(attributes.begin(), attributes.end(), *demographic) != attributes.end()) {
    throw ConfigError("demographic attribute '" + *demographic + "' must not be a training attribute");
  }
}

namespace {

std::vector<double> dirichlet(std::size_t n, double concentration, Rng& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> out(n);
  double sum = 0.0;
  for (auto& v : out) {
    v = gamma(rng);
    sum += v;
  }
  if (!(sum > 0.0)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    return out;
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<bayes::CalibrationPair> calibration_for(const bayes::BayesianNetwork& bn,
                                                    std::span<const fair::MicroValidationSet> sets) {
  std::vector<std::string> names;
  for (const auto& s : sets) names.push_back(s.attribute);
  return bayes::calibration_pairs(bn, names);
}

void require_finite(double v, const char* what, std::size_t step) {
  if (!std::isfinite(v)) {
    throw DivergenceError(std::string("non-finite ") + what + " at step " + std::to_string(step));
  }
}

}  // namespace

TrainState bnmr_train_step(TrainState state, std::span<const std::size_t> batch, const StepContext& ctx,
                           const TrainConfig& cfg) {
  if (batch.empty()) throw ConfigError("training step needs a non-empty batch");
  const auto& ds = *ctx.train;
  std::vector<nn::Sample> samples;
  samples.reserve(batch.size());
  for (auto r : batch) samples.push_back({ds.features.row(r), ds.labels[r]});

  const auto per_sample = nn::per_sample_loss_and_grad(state.params, samples);
  std::vector<nn::GradVector> grads;
  grads.reserve(batch.size());
  double task_loss = 0.0;
  for (const auto& ls : per_sample) {
    grads.push_back(ls.grad);
    task_loss += ls.loss;
  }
  task_loss /= static_cast<double>(batch.size());
  const std::size_t step_no = state.step + 1;
  require_finite(task_loss, "task loss", step_no);

  StepDiagnostics diag;
  diag.task_loss = task_loss;
  auto ws = WeightState::reset(batch.size(), cfg.temperature);

  if (cfg.mode == Mode::kRandom) {
    if (!ctx.dirichlet_rng) throw StateError("random mode needs a Dirichlet generator");
    ws.rho = dirichlet(batch.size(), cfg.dirichlet_concentration, *ctx.dirichlet_rng);
  } else if (cfg.reweights()) {
    const auto theta_prime = nn::lookahead(state.params, grads, ws.rho, cfg.learning_rate);
    std::optional<std::span<const bayes::CalibrationPair>> calib;
    if (cfg.calibrates()) {
      if (state.calibration.size() != ctx.micro_sets.size()) {
        throw StateError("calibration cache is not aligned with the micro sets");
      }
      calib = std::span<const bayes::CalibrationPair>(state.calibration);
    }
    const auto fl = fair::fairness_loss(theta_prime, *ctx.validation, ctx.micro_sets, calib, cfg.norm);
    require_finite(fl.value, "fairness loss", step_no);
    diag.fair_loss = fl.value;
    diag.meta_gradient = meta_weight_gradient(grads, ws.rho, fl.grad, cfg.learning_rate, cfg.temperature);
    for (std::size_t i = 0; i < ws.logits.size(); ++i) {
      ws.logits[i] -= cfg.meta_learning_rate * diag.meta_gradient[i];
    }
    if (cfg.ablations.no_normalization) {
      ws.rho = shift_normalize(ws.logits);
    } else {
      ws.normalize();
    }
  }

  state.params = nn::sgd_step(state.params, grads, ws.rho, cfg.learning_rate);
  state.step = step_no;
  diag.weights = ws.rho;

  if (state.network && cfg.calibrates()) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      bayes::PredictionObservation obs;
      obs.attributes.reserve(ctx.attribute_columns.size());
      for (auto c : ctx.attribute_columns) obs.attributes.push_back(ds.attributes(batch[i], c));
      obs.prediction = per_sample[i].confidence >= 0.5 ? 1 : 0;
      state.buffer.push_back(std::move(obs));
    }
    if (cfg.updates_online() && state.step % cfg.bn_update_interval == 0) {
      state.network = bayes::online_update(*state.network, state.buffer, cfg.bn_prior_strength);
      state.buffer.clear();
      state.calibration = calibration_for(*state.network, ctx.micro_sets);
    }
  }
  state.last = std::move(diag);
  return state;
}

bayes::BayesianNetwork build_calibration_network(const data::Dataset& train, const TrainConfig& cfg) {
  const auto attrs = train.attribute_columns(cfg.attributes);
  const auto dag = bayes::learn_structure(attrs, cfg.attributes);
  const auto pruned = bayes::prune_edges(dag, attrs, cfg.prune_alpha);
  const auto fitted = bayes::fit_cpts(pruned, attrs, cfg.bn_pseudocount);
  return bayes::append_prediction_node(fitted);
}

namespace {

struct Evaluation {
  fair::FairnessReport report;
  double fair_loss = 0.0;
};

Evaluation evaluate(const nn::ClassifierParams& params, const data::Dataset& ds, const TrainConfig& cfg,
                    std::span<const fair::MicroValidationSet> micro_sets, const data::Dataset* micro_source) {
  const auto preds = nn::predict_labels(params, ds.features);
  Evaluation ev;
  ev.report = fair::evaluate_predictions(preds, ds.labels, ds.attribute_columns(cfg.attributes), cfg.attributes);
  if (micro_source && !micro_sets.empty()) {
    ev.fair_loss = fair::fairness_loss(params, *micro_source, micro_sets, std::nullopt, cfg.norm).value;
  }
  return ev;
}

void check_schema(const data::Dataset& ds, const TrainConfig& cfg, const char* which, std::size_t dim) {
  ds.validate();
  if (ds.size() == 0) throw ConfigError(std::string(which) + " set is empty");
  if (ds.feature_dim() != dim) throw ShapeError(std::string(which) + " set has a different feature dimension");
  for (const auto& a : cfg.attributes) {
    if (!ds.has_attribute(a)) throw ConfigError(std::string(which) + " set lacks attribute '" + a + "'");
  }
  if (cfg.demographic && !ds.has_attribute(*cfg.demographic)) {
    throw ConfigError(std::string(which) + " set lacks demographic attribute '" + *cfg.demographic + "'");
  }
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const data::Dataset& train_set, const data::Dataset& val_set,
                  const data::Dataset& test_set) {
  cfg.validate();
  const auto dim = train_set.feature_dim();
  if (dim == 0) throw ShapeError("training set has no features");
  check_schema(train_set, cfg, "training", dim);
  check_schema(val_set, cfg, "validation", dim);
  check_schema(test_set, cfg, "test", dim);

  std::vector<std::size_t> layer_dims{dim};
  layer_dims.insert(layer_dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  layer_dims.push_back(1);

  TrainState state;
  state.params = nn::init_classifier(layer_dims, cfg.seed);
  const std::size_t per_side = cfg.fairness_val_size / 2;
  auto micro_sets = fair::sample_micro_sets(val_set, cfg.attributes, per_side, mix_seed(cfg.seed, 0));

  StepContext ctx;
  ctx.train = &train_set;
  ctx.validation = &val_set;
  ctx.micro_sets = micro_sets;
  for (const auto& a : cfg.attributes) ctx.attribute_columns.push_back(train_set.attribute_index(a));
  auto dirichlet_rng = make_rng(cfg.seed, Stream::kDirichlet);
  ctx.dirichlet_rng = &dirichlet_rng;

  if (cfg.calibrates()) {
    state.network = build_calibration_network(train_set, cfg);
    state.calibration = calibration_for(*state.network, micro_sets);
  }

  auto shuffle_rng = make_rng(cfg.seed, Stream::kShuffle);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  double best_acc = -1.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.resample_micro_sets_per_epoch && epoch > 1) {
      micro_sets = fair::sample_micro_sets(val_set, cfg.attributes, per_side, mix_seed(cfg.seed, epoch - 1));
      ctx.micro_sets = micro_sets;
      if (state.network) state.calibration = calibration_for(*state.network, micro_sets);
    }
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(shuffle_rng)]);
    }
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto end = std::min(order.size(), start + cfg.batch_size);
      state = bnmr_train_step(std::move(state), std::span<const std::size_t>(order).subspan(start, end - start),
                              ctx, cfg);
      loss_sum += state.last.task_loss;
      ++batches;
    }
    const auto ev = evaluate(state.params, val_set, cfg, micro_sets, &val_set);
    HistoryRow row;
    row.epoch = epoch;
    row.step = state.step;
    row.accuracy = ev.report.accuracy;
    row.mean_tprd = ev.report.mean_tprd;
    row.mean_dig = ev.report.mean_dig;
    row.fair_loss = ev.fair_loss;
    row.task_loss = loss_sum / static_cast<double>(batches);
    result.history.push_back(row);
    if (ev.report.accuracy > best_acc) {
      best_acc = ev.report.accuracy;
      result.params = state.params;
      result.best_epoch = epoch;
    }
  }

  auto final_eval = evaluate(result.params, test_set, cfg, {}, nullptr);
  result.report = std::move(final_eval.report);
  if (cfg.demographic) {
    const auto preds = nn::predict_labels(result.params, test_set.features);
    result.report.demographic_name = *cfg.demographic;
    result.report.demographic =
        fair::demographic_report(preds, test_set.labels, test_set.attribute_column(*cfg.demographic));
    if (!result.report.demographic->defined) {
      result.report.notes.push_back("demographic attribute '" + *cfg.demographic +
                                    "' is one-sided among y=1 test rows");
    }
  }
  result.network = std::move(state.network);
  return result;
}

std::string history_to_csv(const std::vector<HistoryRow>& history) {
  std::string out = "epoch,step,accuracy,mean_tprd,mean_dig,fair_loss,task_loss\n";
  for (const auto& r : history) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.step) + "," + format_double(r.accuracy) + "," +
           format_double(r.mean_tprd) + "," + format_double(r.mean_dig) + "," + format_double(r.fair_loss) + "," +
           format_double(r.task_loss) + "\n";
  }
  return out;
}

}  // namespace bnmr::meta
