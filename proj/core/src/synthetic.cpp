#include "bnmr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bnmr/errors.hpp"
#include "bnmr/rng.hpp"

namespace bnmr::data {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SyntheticSpec::validate() const {
  const auto k = attribute_bn.size();
  if (k == 0) throw ConfigError("synthetic spec needs at least one attribute");
  if (attribute_bn.prediction_node()) throw ConfigError("attribute network must not have a prediction node");
  if (label_rule.coefficients.size() != k) {
    throw ConfigError("label rule has " + std::to_string(label_rule.coefficients.size()) +
                      " coefficients for " + std::to_string(k) + " attributes");
  }
  if (!(label_rule.noise >= 0.0)) throw ConfigError("label noise must be non-negative");
  const auto& f = feature_rule;
  if (f.dim == 0) throw ConfigError("feature dimension must be positive");
  if (!(f.sigma > 0.0)) throw ConfigError("feature noise sigma must be positive");
  if (f.attribute_shifts.size() != k) throw ConfigError("need one feature shift vector per attribute");
  for (std::size_t i = 0; i < k; ++i) {
    if (f.attribute_shifts[i].size() != f.dim) {
      throw ConfigError("feature shift of '" + attribute_bn.structure().name(i) + "' has wrong length");
    }
  }
  if (f.label_shift.size() != f.dim) throw ConfigError("label feature shift has wrong length");
  if (bias_rule) {
    if (bias_rule->attribute >= k) throw ConfigError("bias attribute index out of range");
    for (int v = 0; v < 2; ++v) {
      if (!is_probability(bias_rule->pos_to_neg[v]) || !is_probability(bias_rule->neg_to_pos[v])) {
        throw ConfigError("bias flip probabilities must lie in [0, 1]");
      }
    }
  }
}

SyntheticSpec SyntheticSpec::without_bias() const {
  SyntheticSpec s = *this;
  s.bias_rule.reset();
  return s;
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("synthetic dataset needs at least one row");
  spec.validate();
  const auto& bn = spec.attribute_bn;
  const auto k = bn.size();
  const auto order = bn.structure().topological_order();
  const auto& fr = spec.feature_rule;
  auto rng = make_rng(seed, Stream::kSynthetic);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset ds;
  ds.attribute_names = bn.structure().node_names();
  ds.target_name = spec.target_name;
  ds.features = RealMatrix(n, fr.dim);
  ds.attributes = BinaryMatrix(n, k);
  ds.labels.resize(n);
  ds.ids.resize(n);
  std::vector<std::uint8_t> a(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto v : order) {
      const auto& cpt = bn.cpt(v);
      a[v] = unif(rng) < cpt.table[cpt.config_index(a)] ? 1 : 0;
    }
    double logit = spec.label_rule.intercept;
    for (std::size_t i = 0; i < k; ++i) logit += spec.label_rule.coefficients[i] * a[i];
    // Standard logistic noise via the inverse CDF.
    double u = unif(rng);
    u = std::min(std::max(u, 1e-300), 1.0 - 1e-16);
    const double eps = std::log(u) - std::log1p(-u);
    const std::uint8_t y_true = logit + spec.label_rule.noise * eps > 0.0 ? 1 : 0;

    auto x = ds.features.row(r);
    for (std::size_t j = 0; j < fr.dim; ++j) {
      double v = y_true ? fr.label_shift[j] : 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (a[i]) v += fr.attribute_shifts[i][j];
      }
      x[j] = v + fr.sigma * gauss(rng);
    }

    std::uint8_t y = y_true;
    if (spec.bias_rule) {
      const auto g = a[spec.bias_rule->attribute];
      const double flip = y ? spec.bias_rule->pos_to_neg[g] : spec.bias_rule->neg_to_pos[g];
      const double draw = unif(rng);
      if (draw < flip) y = 1 - y;
    }
    ds.labels[r] = y;
    std::copy(a.begin(), a.end(), ds.attributes.row(r).begin());
    ds.ids[r] = std::to_string(r);
  }
  return ds;
}

SyntheticSpec synthetic_spec_from_config(const KvConfig& cfg) {
  cfg.reject_unknown({"attributes.names", "target.name", "label.intercept", "label.coefficients", "label.noise",
                      "features.dim", "features.sigma", "features.label_shift", "bias.attribute",
                      "bias.pos_to_neg", "bias.neg_to_pos"},
                     {"attributes.parents.", "attributes.cpt.", "features.shift."});
  const auto names = cfg.get_list("attributes.names");
  if (names.empty()) throw ConfigError(cfg.source() + ": attributes.names is empty");
  auto index_of = [&](const std::string& n) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw ConfigError(cfg.source() + ": unknown attribute '" + n + "'");
    return static_cast<std::size_t>(it - names.begin());
  };
  std::vector<std::vector<std::size_t>> parents(names.size());
  for (std::size_t v = 0; v < names.size(); ++v) {
    for (const auto& p : cfg.get_list("attributes.parents." + names[v], {})) parents[v].push_back(index_of(p));
  }
  for (const auto& key : cfg.keys_with_prefix("attributes.")) {
    for (const std::string prefix : {"attributes.parents.", "attributes.cpt."}) {
      if (key.rfind(prefix, 0) == 0) (void)index_of(key.substr(prefix.size()));
    }
  }
  bayes::DagStructure dag(names, parents);
  std::vector<bayes::Cpt> cpts;
  for (std::size_t v = 0; v < names.size(); ++v) {
    const auto table = cfg.get_doubles("attributes.cpt." + names[v]);
    for (double p : table) {
      if (!is_probability(p)) {
        throw ConfigError(cfg.source() + ": attributes.cpt." + names[v] + " has a value outside [0, 1]");
      }
    }
    cpts.push_back(bayes::Cpt{v, dag.parents(v), table});
  }

  SyntheticSpec spec;
  spec.attribute_bn = bayes::BayesianNetwork(std::move(dag), std::move(cpts));
  spec.target_name = cfg.get_string("target.name", "target");
  spec.label_rule.intercept = cfg.get_double("label.intercept", 0.0);
  spec.label_rule.coefficients = cfg.get_doubles("label.coefficients");
  spec.label_rule.noise = cfg.get_double("label.noise", 1.0);
  const auto dim = cfg.get_int("features.dim");
  if (dim <= 0) throw ConfigError(cfg.source() + ": features.dim must be positive");
  spec.feature_rule.dim = static_cast<std::size_t>(dim);
  spec.feature_rule.sigma = cfg.get_double("features.sigma", 1.0);
  for (const auto& n : names) {
    const auto key = "features.shift." + n;
    spec.feature_rule.attribute_shifts.push_back(
        cfg.has(key) ? cfg.get_doubles(key) : std::vector<double>(spec.feature_rule.dim, 0.0));
  }
  spec.feature_rule.label_shift = cfg.has("features.label_shift")
                                      ? cfg.get_doubles("features.label_shift")
                                      : std::vector<double>(spec.feature_rule.dim, 0.0);
  if (cfg.has("bias.attribute")) {
    BiasRule b;
    b.attribute = index_of(cfg.get_string("bias.attribute"));
    auto pair = [&](const std::string& key) {
      std::array<double, 2> out{0.0, 0.0};
      if (!cfg.has(key)) return out;
      const auto v = cfg.get_doubles(key);
      if (v.size() != 2) throw ConfigError(cfg.source() + ": " + key + " needs two values (attribute=0, attribute=1)");
      out = {v[0], v[1]};
      return out;
    };
    b.pos_to_neg = pair("bias.pos_to_neg");
    b.neg_to_pos = pair("bias.neg_to_pos");
    spec.bias_rule = b;
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(cfg.source() + ": " + e.what());
  }
  return spec;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  return synthetic_spec_from_config(KvConfig::load(path));
}

}  // namespace bnmr::data
