#include "bnmr_cli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <thread>

#include "bnmr/errors.hpp"
#include "bnmr/rng.hpp"
#include "bnmr/strings.hpp"
#include "bnmr/synthetic.hpp"

namespace bnmr::cli {

RunMode parse_run_mode(const std::string& token) {
  RunMode m;
  m.name = token;
  if (token == "vanilla" || token == "random" || token == "bnmr") {
    m.mode = meta::parse_mode(token);
  } else if (token == "no_normalization") {
    m.ablations.no_normalization = true;
  } else if (token == "no_online_update") {
    m.ablations.no_online_update = true;
  } else if (token == "no_calibration") {
    m.ablations.no_calibration = true;
  } else if (token == "no_reweighting") {
    m.ablations.no_reweighting = true;
  } else {
    throw ConfigError("unknown mode '" + token +
                      "' (expected vanilla, random, bnmr, no_normalization, no_online_update, no_calibration "
                      "or no_reweighting)");
  }
  return m;
}

namespace {

std::size_t positive_size(const KvConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.get_int(key, static_cast<long long>(fallback));
  if (v <= 0) throw ConfigError(cfg.source() + ": " + key + " must be positive");
  return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
  long long v = 0;
  if (!parse_int(text, v) || v < 0) throw ConfigError(where + ": seed '" + text + "' is not a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

ExperimentConfig experiment_from_config(const KvConfig& cfg) {
  cfg.reject_unknown({"data.source", "data.spec", "data.train_rows", "data.val_rows", "data.test_rows", "data.seed",
                      "data.path", "data.partition", "data.split", "data.target", "data.features", "attributes",
                      "demographic", "train.batch_size", "train.learning_rate", "train.meta_learning_rate",
                      "train.temperature", "train.bn_update_interval", "train.bn_prior_strength",
                      "train.fairness_val_size", "train.epochs", "train.norm", "train.hidden", "train.modes",
                      "train.seeds", "train.parallel", "train.resample_micro_sets", "train.prune_alpha",
                      "train.bn_pseudocount", "train.dirichlet_concentration"});
  ExperimentConfig ex;
  auto& d = ex.data;
  const auto source = cfg.get_string("data.source", "synthetic");
  if (source == "synthetic") {
    d.source = DataSource::kSynthetic;
    d.spec = cfg.get_path("data.spec");
    d.train_rows = positive_size(cfg, "data.train_rows", d.train_rows);
    d.val_rows = positive_size(cfg, "data.val_rows", d.val_rows);
    d.test_rows = positive_size(cfg, "data.test_rows", d.test_rows);
  } else if (source == "csv" || source == "celeba") {
    d.source = source == "csv" ? DataSource::kCsv : DataSource::kCelebA;
    d.path = cfg.get_path("data.path");
    if (cfg.has("data.partition")) d.partition = cfg.get_path("data.partition");
    if (cfg.has("data.split")) {
      d.split = cfg.get_doubles("data.split");
      if (d.split.size() != 3) throw ConfigError(cfg.source() + ": data.split needs three ratios");
    }
    if (d.source == DataSource::kCelebA) {
      d.target = cfg.get_string("data.target");
      if (cfg.has("data.features")) d.features = cfg.get_list("data.features");
    }
  } else {
    throw ConfigError(cfg.source() + ": data.source must be synthetic, csv or celeba, got '" + source + "'");
  }
  if (cfg.has("data.seed")) d.seed = parse_seed(cfg.get_string("data.seed"), cfg.source());

  auto& t = ex.train;
  t.attributes = cfg.get_list("attributes");
  if (cfg.has("demographic")) t.demographic = cfg.get_string("demographic");
  d.attributes = t.attributes;
  if (t.demographic) d.attributes.push_back(*t.demographic);
  t.batch_size = positive_size(cfg, "train.batch_size", t.batch_size);
  t.learning_rate = cfg.get_double("train.learning_rate", t.learning_rate);
  t.meta_learning_rate = cfg.get_double("train.meta_learning_rate", t.meta_learning_rate);
  t.temperature = cfg.get_double("train.temperature", t.temperature);
  t.bn_update_interval = positive_size(cfg, "train.bn_update_interval", t.bn_update_interval);
  t.bn_prior_strength = cfg.get_double("train.bn_prior_strength", t.bn_prior_strength);
  t.fairness_val_size = positive_size(cfg, "train.fairness_val_size", t.fairness_val_size);
  t.epochs = positive_size(cfg, "train.epochs", t.epochs);
  const auto norm = cfg.get_string("train.norm", "L1");
  if (norm == "L1") {
    t.norm = fair::Norm::kL1;
  } else if (norm == "L2") {
    t.norm = fair::Norm::kL2;
  } else {
    throw ConfigError(cfg.source() + ": train.norm must be L1 or L2, got '" + norm + "'");
  }
  if (cfg.has("train.hidden")) {
    t.hidden_dims.clear();
    for (const auto& h : cfg.get_list("train.hidden")) {
      long long v = 0;
      if (!parse_int(h, v) || v <= 0) {
        throw ConfigError(cfg.source() + ": train.hidden entry '" + h + "' is not a positive integer");
      }
      t.hidden_dims.push_back(static_cast<std::size_t>(v));
    }
  }
  t.resample_micro_sets_per_epoch = cfg.get_bool("train.resample_micro_sets", false);
  t.prune_alpha = cfg.get_double("train.prune_alpha", t.prune_alpha);
  t.bn_pseudocount = cfg.get_double("train.bn_pseudocount", t.bn_pseudocount);
  t.dirichlet_concentration = cfg.get_double("train.dirichlet_concentration", t.dirichlet_concentration);

  for (const auto& m : cfg.get_list("train.modes", {"vanilla", "bnmr"})) ex.modes.push_back(parse_run_mode(m));
  if (ex.modes.empty()) throw ConfigError(cfg.source() + ": train.modes is empty");
  if (cfg.has("train.seeds")) {
    ex.seeds.clear();
    for (const auto& s : cfg.get_list("train.seeds")) ex.seeds.push_back(parse_seed(s, cfg.source()));
    if (ex.seeds.empty()) throw ConfigError(cfg.source() + ": train.seeds is empty");
  }
  ex.parallel = cfg.get_bool("train.parallel", false);

  for (const auto& m : ex.modes) {
    auto probe = t;
    probe.mode = m.mode;
    probe.ablations = m.ablations;
    try {
      probe.validate();
    } catch (const Error& e) {
      throw ConfigError(cfg.source() + ": mode " + m.name + ": " + e.what());
    }
  }
  return ex;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return experiment_from_config(KvConfig::load(path));
}

data::Splits load_splits(const DataConfig& cfg, std::uint64_t seed) {
  const auto s = cfg.seed.value_or(seed);
  if (cfg.source == DataSource::kSynthetic) {
    const auto spec = data::load_synthetic_spec(cfg.spec);
    const auto clean = spec.without_bias();
    data::Splits out;
    out.train = data::generate_synthetic(spec, cfg.train_rows, mix_seed(s, static_cast<std::uint64_t>(Stream::kTrainData)));
    out.val = data::generate_synthetic(clean, cfg.val_rows, mix_seed(s, static_cast<std::uint64_t>(Stream::kValData)));
    out.test = data::generate_synthetic(clean, cfg.test_rows, mix_seed(s, static_cast<std::uint64_t>(Stream::kTestData)));
    return out;
  }
  data::Dataset ds;
  if (cfg.source == DataSource::kCsv) {
    ds = data::read_dataset_csv(cfg.path);
  } else {
    ds = data::load_attribute_csv(cfg.path, cfg.target, cfg.attributes, cfg.features);
  }
  if (cfg.partition) return data::split_by_partition(ds, *cfg.partition);
  return data::split_by_ratio(ds, {cfg.split[0], cfg.split[1], cfg.split[2]},
                              mix_seed(s, static_cast<std::uint64_t>(Stream::kSplit)));
}

namespace {

RunResult run_one(const ExperimentConfig& cfg, const RunMode& mode, std::uint64_t seed) {
  try {
    auto tc = cfg.train;
    tc.mode = mode.mode;
    tc.ablations = mode.ablations;
    tc.seed = seed;
    const auto splits = load_splits(cfg.data, seed);
    return {mode.name, seed, meta::train(tc, splits.train, splits.val, splits.test)};
  } catch (const std::exception& e) {
    throw Error("run mode=" + mode.name + " seed=" + std::to_string(seed) + ": " + e.what());
  }
}

}  // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  std::vector<std::pair<const RunMode*, std::uint64_t>> jobs;
  for (const auto& m : cfg.modes) {
    for (auto s : cfg.seeds) jobs.emplace_back(&m, s);
  }
  std::vector<RunResult> runs(jobs.size());
  if (!cfg.parallel) {
    for (std::size_t i = 0; i < jobs.size(); ++i) runs[i] = run_one(cfg, *jobs[i].first, jobs[i].second);
    return runs;
  }
  std::vector<std::exception_ptr> failures(jobs.size());
  std::vector<std::thread> workers;
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t w = 0; w < width; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < jobs.size(); i += width) {
        try {
          runs[i] = run_one(cfg, *jobs[i].first, jobs[i].second);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return runs;
}

std::vector<std::pair<std::string, double>> report_metrics(const fair::FairnessReport& report) {
  std::vector<std::pair<std::string, double>> out{
      {"accuracy", report.accuracy}, {"mean_tprd", report.mean_tprd}, {"mean_dig", report.mean_dig}};
  for (const auto& [name, v] : report.per_attribute_tprd) out.emplace_back("per_attribute.tprd." + name, v);
  for (const auto& [name, v] : report.per_attribute_dig) out.emplace_back("per_attribute.dig." + name, v);
  if (report.demographic && report.demographic->defined) {
    out.emplace_back("demographic.tprd", report.demographic->tprd);
    out.emplace_back("demographic.dig", report.demographic->dig);
  }
  return out;
}

std::string aggregate_to_text(const std::vector<RunResult>& runs) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunResult*>> by_mode;
  for (const auto& r : runs) {
    if (!by_mode.count(r.mode)) order.push_back(r.mode);
    by_mode[r.mode].push_back(&r);
  }
  std::string out;
  for (const auto& mode : order) {
    const auto& group = by_mode[mode];
    out += mode + ".runs=" + std::to_string(group.size()) + "\n";
    std::vector<std::string> metric_order;
    std::map<std::string, std::vector<double>> values;
    for (const auto* r : group) {
      for (const auto& [k, v] : report_metrics(r->result.report)) {
        if (!values.count(k)) metric_order.push_back(k);
        values[k].push_back(v);
      }
    }
    for (const auto& k : metric_order) {
      const auto& xs = values[k];
      double mean = 0.0;
      for (auto x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (auto x : xs) var += (x - mean) * (x - mean);
      const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
      out += mode + "." + k + ".mean=" + format_double(mean) + "\n";
      out += mode + "." + k + ".std=" + format_double(sd) + "\n";
      if (xs.size() != group.size()) {
        out += mode + "." + k + ".count=" + std::to_string(xs.size()) + "\n";
      }
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void write_experiment_outputs(const std::vector<RunResult>& runs, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  for (const auto& r : runs) {
    const auto stem = r.mode + "_" + std::to_string(r.seed);
    auto report = r.result.report;
    report.notes.push_back("checkpoint epoch " + std::to_string(r.result.best_epoch));
    write_text(out_dir / ("report_" + stem + ".txt"), fair::report_to_text(report));
    write_text(out_dir / ("history_" + stem + ".csv"), meta::history_to_csv(r.result.history));
  }
  write_text(out_dir / "aggregate.txt", aggregate_to_text(runs));
}

}  // namespace bnmr::cli
