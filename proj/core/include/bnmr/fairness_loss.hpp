#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bnmr/bayesnet.hpp"
#include "bnmr/dataset.hpp"
#include "bnmr/diffcore.hpp"
#include "bnmr/fairmetrics.hpp"
#include "bnmr/inference.hpp"

namespace bnmr::fair {

enum class Norm { kL1, kL2 };

struct FairnessLoss {
  double value = 0.0;
  nn::GradVector grad;
  std::vector<double> per_attribute;  // d_m (or d_m^2 for L2)
};

/// Soft-confidence disparity over micro sets:
///   d_m = |Z_m(1) * mean f(Pos_m) - Z_m(0) * mean f(Neg_m)|, squared for L2,
/// averaged uniformly over m. `calibration` holds one (Z(1), Z(0)) pair per
/// micro set and is treated as a constant; without it every Z is 1.
FairnessLoss fairness_loss(const nn::ClassifierParams& params, const data::Dataset& validation,
                           std::span<const MicroValidationSet> micro_sets,
                           std::optional<std::span<const bayes::CalibrationPair>> calibration, Norm norm);

/// Same, computing the calibration pairs from `bn` (which must carry a
/// prediction node) when supplied.
FairnessLoss fairness_loss(const nn::ClassifierParams& params, const data::Dataset& validation,
                           std::span<const MicroValidationSet> micro_sets, const bayes::BayesianNetwork* bn,
                           Norm norm);

}  // namespace bnmr::fair
