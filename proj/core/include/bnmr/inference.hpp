#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnmr/bayesnet.hpp"

namespace bnmr::bayes {

struct Observation {
  std::size_t node = 0;
  std::uint8_t value = 0;
};

/// Exact P(query | evidence) by variable elimination. Variables are
/// eliminated in min-degree order on the interaction graph of the remaining
/// factors (initially the moral graph), ties broken by node index.
/// Throws UndefinedConditionalError when P(evidence) == 0.
double variable_elimination(const BayesianNetwork& bn, Observation query,
                            std::span<const Observation> evidence = {});

/// The order variable_elimination would use for this query.
std::vector<std::size_t> elimination_order(const BayesianNetwork& bn, Observation query,
                                           std::span<const Observation> evidence = {});

/// Z = P(A = value | Yhat = 1) / P(A = value).
double calibrator_z(const BayesianNetwork& bn, const std::string& attribute, std::uint8_t value);

/// (Z(A=1), Z(A=0)) for one attribute.
struct CalibrationPair {
  double z_pos = 1.0;
  double z_neg = 1.0;
};

std::vector<CalibrationPair> calibration_pairs(const BayesianNetwork& bn,
                                               const std::vector<std::string>& attributes);

}  // namespace bnmr::bayes
