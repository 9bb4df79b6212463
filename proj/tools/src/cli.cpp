#include "bnmr_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "bnmr/bayesnet.hpp"
#include "bnmr/errors.hpp"
#include "bnmr/fairmetrics.hpp"
#include "bnmr/independence.hpp"
#include "bnmr/network_io.hpp"
#include "bnmr/strings.hpp"
#include "bnmr/structure.hpp"
#include "bnmr/synthetic.hpp"
#include "bnmr_cli/experiment.hpp"

namespace bnmr::cli {
namespace {

namespace fs = std::filesystem;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& tok : split(text, ',')) {
    long long v = 0;
    const auto t = trim(tok);
    if (!parse_int(t, v) || v < 0) throw ConfigError("--seed: '" + std::string(t) + "' is not a non-negative integer");
    seeds.push_back(static_cast<std::uint64_t>(v));
  }
  if (seeds.empty()) throw ConfigError("--seed: empty seed list");
  return seeds;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& tok : split(text, ',')) {
    auto t = std::string(trim(tok));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

// Flag value when given, else the config key, else nothing.
std::optional<std::string> pick(const std::string& flag, const std::optional<KvConfig>& cfg, const std::string& key) {
  if (!flag.empty()) return flag;
  if (cfg && cfg->has(key)) return cfg->get_string(key);
  return std::nullopt;
}

std::optional<fs::path> pick_path(const std::string& flag, const std::optional<KvConfig>& cfg,
                                  const std::string& key) {
  if (!flag.empty()) return fs::path(flag);
  if (cfg && cfg->has(key)) return cfg->get_path(key);
  return std::nullopt;
}

std::vector<std::uint8_t> read_predictions(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open predictions file '" + path.string() + "'");
  std::vector<std::uint8_t> out;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t == "1") {
      out.push_back(1);
    } else if (t == "0" || t == "-1") {
      out.push_back(0);
    } else {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": prediction '" + std::string(t) +
                       "' is not 0, 1 or -1");
    }
  }
  return out;
}

BinaryMatrix table_columns(const data::AttributeTable& table, const std::vector<std::string>& names) {
  BinaryMatrix out(table.values.rows(), names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto c = table.column(names[j]);
    for (std::size_t r = 0; r < out.rows(); ++r) out(r, j) = table.values(r, c);
  }
  return out;
}

bool table_has(const data::AttributeTable& table, const std::string& name) {
  return std::find(table.names.begin(), table.names.end(), name) != table.names.end();
}

struct Common {
  std::string config;
  std::string out;
  std::string seed;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "Configuration file");
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--seed", c.seed, "Seed or comma-separated seed list");
}

int cmd_gen_data(const Common& c, std::size_t rows, bool unbiased, std::ostream& out) {
  auto spec = data::load_synthetic_spec(c.config);
  if (unbiased) spec = spec.without_bias();
  const auto seeds = c.seed.empty() ? std::vector<std::uint64_t>{0} : parse_seed_list(c.seed);
  ensure_dir(c.out);
  for (auto s : seeds) {
    const auto name = seeds.size() == 1 ? std::string("dataset.csv") : "dataset_" + std::to_string(s) + ".csv";
    const auto ds = data::generate_synthetic(spec, rows, s);
    write_text(fs::path(c.out) / name, data::dataset_to_csv(ds));
    out << "wrote " << (fs::path(c.out) / name).string() << " (" << ds.size() << " rows)\n";
  }
  return 0;
}

int cmd_bn_learn(const Common& c, const std::string& data_flag, const std::string& attr_flag, std::ostream& out) {
  BinaryMatrix columns;
  std::vector<std::string> names;
  if (!data_flag.empty()) {
    const auto table = data::load_any_attribute_table(data_flag);
    names = attr_flag.empty() ? table.names : parse_name_list(attr_flag);
    if (names.size() > bayes::kMaxExhaustiveNodes) {
      throw CapacityError("bn-learn supports at most " + std::to_string(bayes::kMaxExhaustiveNodes) +
                          " attributes, got " + std::to_string(names.size()));
    }
    columns = table_columns(table, names);
  } else if (!c.config.empty()) {
    const auto ex = load_experiment(c.config);
    names = attr_flag.empty() ? ex.train.attributes : parse_name_list(attr_flag);
    if (names.size() > bayes::kMaxExhaustiveNodes) {
      throw CapacityError("bn-learn supports at most " + std::to_string(bayes::kMaxExhaustiveNodes) +
                          " attributes, got " + std::to_string(names.size()));
    }
    const auto seeds = c.seed.empty() ? ex.seeds : parse_seed_list(c.seed);
    const auto splits = load_splits(ex.data, seeds.front());
    columns = splits.train.attribute_columns(names);
  } else {
    throw ConfigError("bn-learn needs --data or --config");
  }
  const auto dag = bayes::learn_structure(columns, names);
  const auto pruned = bayes::prune_edges(dag, columns, 0.05);
  const auto bn = bayes::append_prediction_node(bayes::fit_cpts(pruned, columns, 1.0));
  ensure_dir(c.out);
  bayes::save_network(bn, fs::path(c.out) / "bn.txt");
  out << "wrote " << (fs::path(c.out) / "bn.txt").string() << " (" << pruned.edge_count() << " edges)\n";
  return 0;
}

int cmd_train(const Common& c, bool parallel, std::ostream& out) {
  auto ex = load_experiment(c.config);
  if (!c.seed.empty()) ex.seeds = parse_seed_list(c.seed);
  if (parallel) ex.parallel = true;
  const auto runs = run_experiment(ex);
  write_experiment_outputs(runs, c.out);
  for (const auto& r : runs) {
    out << r.mode << " seed=" << r.seed << " accuracy=" << format_double(r.result.report.accuracy)
        << " mean_tprd=" << format_double(r.result.report.mean_tprd)
        << " mean_dig=" << format_double(r.result.report.mean_dig) << "\n";
  }
  return 0;
}

struct AuditFlags {
  std::string data, predictions, attributes, demographic, target;
};

int cmd_audit(const Common& c, const AuditFlags& f, std::ostream& out) {
  std::optional<KvConfig> cfg;
  if (!c.config.empty()) cfg = KvConfig::load(c.config);
  const auto data_path = pick_path(f.data, cfg, "data.path");
  const auto pred_path = pick_path(f.predictions, cfg, "predictions");
  if (!data_path) throw ConfigError("audit needs --data (or data.path in the config)");
  if (!pred_path) throw ConfigError("audit needs --predictions (or predictions in the config)");
  const auto table = data::load_any_attribute_table(*data_path);
  const auto target = pick(f.target, cfg, "data.target").value_or(table.names.front());
  auto attrs_text = pick(f.attributes, cfg, "attributes");
  if (!attrs_text) throw ConfigError("audit needs --attributes (or attributes in the config)");
  const auto attrs = parse_name_list(*attrs_text);
  const auto preds = read_predictions(*pred_path);
  if (preds.size() != table.ids.size()) {
    throw DataError("predictions file '" + pred_path->string() + "' has " + std::to_string(preds.size()) +
                    " rows but the data has " + std::to_string(table.ids.size()));
  }
  const auto labels_m = table_columns(table, {target});
  const auto labels = labels_m.column(0);
  auto report = fair::evaluate_predictions(preds, labels, table_columns(table, attrs), attrs);

  auto phi_names = attrs;
  if (const auto demo = pick(f.demographic, cfg, "demographic")) {
    if (table_has(table, *demo)) {
      const auto col = table_columns(table, {*demo}).column(0);
      report.demographic = fair::demographic_report(preds, labels, col);
      report.demographic_name = *demo;
      phi_names.push_back(*demo);
    } else {
      report.notes.push_back("demographic column '" + *demo + "' not found; demographic section omitted");
    }
  }
  report.phi = fair::phi_matrix(table_columns(table, phi_names), phi_names);
  ensure_dir(c.out);
  write_text(fs::path(c.out) / "report_audit.txt", fair::report_to_text(report));
  write_text(fs::path(c.out) / "phi.csv", fair::phi_to_csv(*report.phi));
  out << "accuracy=" << format_double(report.accuracy) << " mean_tprd=" << format_double(report.mean_tprd)
      << " mean_dig=" << format_double(report.mean_dig) << "\n";
  return 0;
}

int cmd_phi(const Common& c, const std::string& data_flag, const std::string& columns_flag, std::ostream& out) {
  std::optional<KvConfig> cfg;
  if (!c.config.empty()) cfg = KvConfig::load(c.config);
  const auto data_path = pick_path(data_flag, cfg, "data.path");
  if (!data_path) throw ConfigError("phi needs --data (or data.path in the config)");
  const auto table = data::load_any_attribute_table(*data_path);
  const auto cols_text = pick(columns_flag, cfg, "columns");
  const auto names = cols_text ? parse_name_list(*cols_text) : table.names;
  const auto phi = fair::phi_matrix(table_columns(table, names), names);
  ensure_dir(c.out);
  write_text(fs::path(c.out) / "phi.csv", fair::phi_to_csv(phi));
  for (const auto& d : phi.degenerate) out << "note: column '" << d << "' is constant\n";
  out << "wrote " << (fs::path(c.out) / "phi.csv").string() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fairness-aware sample reweighting with a Bayesian-network calibrator", "bnmr"};
  app.require_subcommand(1);

  Common gen_c, bn_c, train_c, audit_c, phi_c;
  std::size_t rows = 1000;
  bool unbiased = false;
  auto* gen = app.add_subcommand("gen-data", "Sample a synthetic dataset from a generator spec");
  add_common(gen, gen_c, true);
  gen->add_option("--rows", rows, "Number of rows")->check(CLI::PositiveNumber);
  gen->add_flag("--unbiased", unbiased, "Skip the label-flip bias");

  std::string bn_data, bn_attrs;
  auto* bn = app.add_subcommand("bn-learn", "Learn the attribute network and write bn.txt");
  add_common(bn, bn_c, false);
  bn->add_option("--data", bn_data, "Dataset CSV or annotation table");
  bn->add_option("--attributes", bn_attrs, "Comma-separated attribute names");

  bool parallel = false;
  auto* tr = app.add_subcommand("train", "Train every configured mode and seed");
  add_common(tr, train_c, true);
  tr->add_flag("--parallel", parallel, "Run seeds concurrently");

  AuditFlags af;
  auto* audit = app.add_subcommand("audit", "Fairness report for an existing prediction file");
  add_common(audit, audit_c, false);
  audit->add_option("--data", af.data, "Dataset CSV or annotation table");
  audit->add_option("--predictions", af.predictions, "One 0/1 prediction per row");
  audit->add_option("--attributes", af.attributes, "Comma-separated attribute names");
  audit->add_option("--demographic", af.demographic, "Held-out demographic column");
  audit->add_option("--target", af.target, "Label column (default: first column)");

  std::string phi_data, phi_cols;
  auto* phi = app.add_subcommand("phi", "Pairwise phi coefficients between binary columns");
  add_common(phi, phi_c, false);
  phi->add_option("--data", phi_data, "Dataset CSV or annotation table");
  phi->add_option("--columns", phi_cols, "Comma-separated column names (default: all)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) return cmd_gen_data(gen_c, rows, unbiased, out);
    if (*bn) return cmd_bn_learn(bn_c, bn_data, bn_attrs, out);
    if (*tr) return cmd_train(train_c, parallel, out);
    if (*audit) return cmd_audit(audit_c, af, out);
    if (*phi) return cmd_phi(phi_c, phi_data, phi_cols, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace bnmr::cli
