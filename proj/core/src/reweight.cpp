#include "bnmr/reweight.hpp"

#include <algorithm>
#include <cmath>

#include "bnmr/errors.hpp"

namespace bnmr::meta {

std::vector<double> tempered_softmax(std::span<const double> logits, double tau) {
  if (logits.empty()) throw ShapeError("tempered softmax needs a non-empty vector");
  if (!(tau > 0.0)) throw ConfigError("softmax temperature must be positive");
  for (double w : logits) {
    if (std::isnan(w)) throw DataError("NaN weight logit");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - mx) / tau);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

WeightState WeightState::reset(std::size_t n, double temperature) {
  WeightState s;
  s.logits.assign(n, 0.0);
  s.temperature = temperature;
  s.normalize();
  return s;
}

void WeightState::normalize() { rho = tempered_softmax(logits, temperature); }

std::vector<double> shift_normalize(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("weight normalization needs a non-empty vector");
  const double mn = *std::min_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = logits[i] - mn;
    sum += out[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> weight_sensitivities(std::span<const nn::GradVector> sample_grads,
                                         const nn::GradVector& fair_grad, double alpha) {
  std::vector<double> c(sample_grads.size());
  for (std::size_t j = 0; j < sample_grads.size(); ++j) c[j] = -alpha * sample_grads[j].dot(fair_grad);
  return c;
}

std::vector<double> meta_weight_gradient(std::span<const nn::GradVector> sample_grads,
                                         std::span<const double> rho, const nn::GradVector& fair_grad,
                                         double alpha, double tau) {
  if (sample_grads.size() != rho.size()) {
    throw ShapeError("meta gradient: " + std::to_string(sample_grads.size()) + " sample gradients but " +
                     std::to_string(rho.size()) + " weights");
  }
  if (!(tau > 0.0)) throw ConfigError("softmax temperature must be positive");
  const auto c = weight_sensitivities(sample_grads, fair_grad, alpha);
  // rho_i * sum_j rho_j (c_i - c_j) equals rho_i (c_i - sum_j rho_j c_j) for
  // normalized rho, and is exactly zero when all c_j coincide.
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += rho[j] * (c[i] - c[j]);
    out[i] = rho[i] * s / tau;
  }
  return out;
}

}  // namespace bnmr::meta
