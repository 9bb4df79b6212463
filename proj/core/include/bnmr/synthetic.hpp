#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnmr/bayesnet.hpp"
#include "bnmr/dataset.hpp"
#include "bnmr/kv_config.hpp"

namespace bnmr::data {

/// y_true = 1[intercept + coefficients . a + noise * e > 0] with e drawn
/// from the standard logistic distribution, so noise = 1 is an ordinary
/// logistic model and noise = 0 a deterministic threshold.
struct LabelRule {
  double intercept = 0.0;
  std::vector<double> coefficients;  // one per attribute node
  double noise = 1.0;
};

/// x = sum_k a_k * attribute_shifts[k] + y_true * label_shift + sigma * N(0, I).
struct FeatureRule {
  std::size_t dim = 0;
  std::vector<std::vector<double>> attribute_shifts;  // one vector per attribute node
  std::vector<double> label_shift;
  double sigma = 1.0;
};

/// Flips the observed label depending on one attribute's value.
struct BiasRule {
  std::size_t attribute = 0;
  std::array<double, 2> pos_to_neg{0.0, 0.0};  // indexed by attribute value
  std::array<double, 2> neg_to_pos{0.0, 0.0};
};

struct SyntheticSpec {
  bayes::BayesianNetwork attribute_bn;
  std::string target_name = "target";
  LabelRule label_rule;
  FeatureRule feature_rule;
  std::optional<BiasRule> bias_rule;

  /// Throws ConfigError on invalid probabilities or shapes.
  void validate() const;
  SyntheticSpec without_bias() const;
};

/// Ancestral sampling of attributes, then labels, features and bias flips.
Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed);

/// Reads a synthetic spec from flat key-value config keys:
///   attributes.names, attributes.parents.<name>, attributes.cpt.<name>,
///   target.name, label.intercept, label.coefficients, label.noise,
///   features.dim, features.sigma, features.shift.<name>, features.label_shift,
///   bias.attribute, bias.pos_to_neg, bias.neg_to_pos
SyntheticSpec synthetic_spec_from_config(const KvConfig& cfg);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

}  // namespace bnmr::data
