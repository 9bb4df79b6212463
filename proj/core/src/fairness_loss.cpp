#include "bnmr/fairness_loss.hpp"

#include <cmath>

#include "bnmr/errors.hpp"

namespace bnmr::fair {

namespace {

// Mean confidence over `rows` and its gradient.
double mean_confidence(const nn::ClassifierParams& params, const data::Dataset& ds,
                       const std::vector<std::size_t>& rows, nn::GradVector& grad) {
  grad.values.assign(params.size(), 0.0);
  double sum = 0.0;
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (auto r : rows) {
    const auto cg = nn::confidence_and_grad(params, ds.features.row(r));
    sum += cg.confidence;
    grad.axpy(inv, cg.grad);
  }
  return sum * inv;
}

}  // namespace

FairnessLoss fairness_loss(const nn::ClassifierParams& params, const data::Dataset& validation,
                           std::span<const MicroValidationSet> micro_sets,
                           std::optional<std::span<const bayes::CalibrationPair>> calibration, Norm norm) {
  if (micro_sets.empty()) throw ConfigError("fairness loss needs at least one micro validation set");
  if (calibration && calibration->size() != micro_sets.size()) {
    throw ShapeError("got " + std::to_string(calibration->size()) + " calibration pairs for " +
                     std::to_string(micro_sets.size()) + " micro sets");
  }
  FairnessLoss out;
  out.grad = nn::GradVector(params.size());
  const double inv_m = 1.0 / static_cast<double>(micro_sets.size());
  nn::GradVector gpos, gneg;
  for (std::size_t m = 0; m < micro_sets.size(); ++m) {
    const auto& set = micro_sets[m];
    if (set.pos_rows.empty() || set.neg_rows.empty()) {
      throw ConfigError("micro set for '" + set.attribute + "' has an empty side");
    }
    const double zp = calibration ? (*calibration)[m].z_pos : 1.0;
    const double zn = calibration ? (*calibration)[m].z_neg : 1.0;
    const double s_pos = mean_confidence(params, validation, set.pos_rows, gpos);
    const double s_neg = mean_confidence(params, validation, set.neg_rows, gneg);
    const double diff = zp * s_pos - zn * s_neg;
    double term = 0.0, outer = 0.0;
    if (norm == Norm::kL1) {
      term = std::abs(diff);
      // Subgradient 0 at an exact tie.
      outer = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    } else {
      term = diff * diff;
      outer = 2.0 * diff;
    }
    out.per_attribute.push_back(term);
    out.value += term * inv_m;
    if (outer != 0.0) {
      out.grad.axpy(outer * zp * inv_m, gpos);
      out.grad.axpy(-outer * zn * inv_m, gneg);
    }
  }
  return out;
}

FairnessLoss fairness_loss(const nn::ClassifierParams& params, const data::Dataset& validation,
                           std::span<const MicroValidationSet> micro_sets, const bayes::BayesianNetwork* bn,
                           Norm norm) {
  if (!bn) return fairness_loss(params, validation, micro_sets, std::nullopt, norm);
  std::vector<std::string> names;
  for (const auto& s : micro_sets) names.push_back(s.attribute);
  const auto pairs = bayes::calibration_pairs(*bn, names);
  return fairness_loss(params, validation, micro_sets, std::span<const bayes::CalibrationPair>(pairs), norm);
}

}  // namespace bnmr::fair
