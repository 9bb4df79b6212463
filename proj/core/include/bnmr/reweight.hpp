#pragma once

#include <span>
#include <vector>

#include "bnmr/diffcore.hpp"

namespace bnmr::meta {

/// rho_i = exp(w_i / tau) / sum_j exp(w_j / tau), computed after subtracting
/// the maximum logit.
std::vector<double> tempered_softmax(std::span<const double> logits, double tau);

/// Per-batch weight logits and their normalized weights.
struct WeightState {
  std::vector<double> logits;
  double temperature = 0.9;
  std::vector<double> rho;

  /// Logits all zero (uniform rho) for a batch of n samples.
  static WeightState reset(std::size_t n, double temperature);
  void normalize();
};

/// Weights from raw logits without the softmax: shift so the minimum is 0,
/// then scale to sum 1. All-equal logits give uniform weights.
std::vector<double> shift_normalize(std::span<const double> logits);

/// c_j = -alpha * <g_j, fair_grad>: first-order effect of sample j's weight
/// on the fairness loss at the lookahead parameters.
std::vector<double> weight_sensitivities(std::span<const nn::GradVector> sample_grads,
                                         const nn::GradVector& fair_grad, double alpha);

/// d L_fair / d w through theta'(w) = theta - alpha * sum_j rho_j(w) g_j and
/// the tempered softmax:
///   dL/dw_i = sum_j c_j * rho_i (delta_ij - rho_j) / tau
///           = rho_i (c_i - sum_j rho_j c_j) / tau.
std::vector<double> meta_weight_gradient(std::span<const nn::GradVector> sample_grads,
                                         std::span<const double> rho, const nn::GradVector& fair_grad,
                                         double alpha, double tau);

}  // namespace bnmr::meta
