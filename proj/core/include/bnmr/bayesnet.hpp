#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnmr/dag.hpp"
#include "bnmr/matrix.hpp"

namespace bnmr::bayes {

/// P(node = 1 | parents). Entry j encodes the parent assignment in binary
/// with parent_order[0] as the least-significant bit.
struct Cpt {
  std::size_t node = 0;
  std::vector<std::size_t> parent_order;
  std::vector<double> table;

  std::size_t config_index(std::span<const std::uint8_t> assignment) const;
  double probability(std::span<const std::uint8_t> assignment) const;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

/// Immutable discrete network over binary nodes. Updates return new values.
class BayesianNetwork {
 public:
  BayesianNetwork() = default;
  /// Validates CPT shapes, ranges and alignment with the structure.
  BayesianNetwork(DagStructure structure, std::vector<Cpt> cpts,
                  std::optional<std::size_t> prediction_node = std::nullopt);

  const DagStructure& structure() const { return structure_; }
  const std::vector<Cpt>& cpts() const { return cpts_; }
  const Cpt& cpt(std::size_t node) const { return cpts_.at(node); }
  std::size_t size() const { return structure_.size(); }
  std::optional<std::size_t> prediction_node() const { return prediction_; }
  std::size_t index_of(const std::string& name) const { return structure_.index_of(name); }

  /// Product of CPT entries for a full assignment (one value per node).
  double joint_probability(std::span<const std::uint8_t> assignment) const;

  friend bool operator==(const BayesianNetwork&, const BayesianNetwork&) = default;

 private:
  DagStructure structure_;
  std::vector<Cpt> cpts_;
  std::optional<std::size_t> prediction_;
};

/// Smoothed MLE: (count(node=1, parents=j) + c) / (count(parents=j) + 2c).
/// With c == 0, unobserved parent configurations get 0.5 and a message is
/// appended to `warnings` when supplied.
BayesianNetwork fit_cpts(const DagStructure& dag, const BinaryMatrix& data, double pseudocount = 1.0,
                         std::vector<std::string>* warnings = nullptr);

inline constexpr std::size_t kMaxPredictionParents = 10;
inline constexpr const char* kPredictionNodeName = "Yhat";

/// Adds a prediction node whose parents are all existing nodes and whose
/// CPT is uniformly 0.5.
BayesianNetwork append_prediction_node(const BayesianNetwork& bn,
                                       const std::string& name = kPredictionNodeName);

struct PredictionObservation {
  std::vector<std::uint8_t> attributes;  // one value per prediction-node parent, in node order
  std::uint8_t prediction = 0;
};

/// Equivalent-sample-size blend of the prediction node's CPT with the
/// buffered observations:
///   entry_j <- (s * entry_j + count(yhat=1, a=j)) / (s + count(a=j)).
/// Only the prediction node changes.
BayesianNetwork online_update(const BayesianNetwork& bn, std::span<const PredictionObservation> buffer,
                              double prior_strength = 80.0);

}  // namespace bnmr::bayes
