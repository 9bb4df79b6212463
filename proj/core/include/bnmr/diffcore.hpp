#pragma once

// Small feed-forward binary classifier with exact per-sample gradients.
//
// Parameters are stored flat, layer by layer: the weight matrix of layer l
// (dims[l+1] x dims[l], row-major) followed by its bias (dims[l+1]). Hidden
// layers use ReLU, the single output logit goes through a sigmoid.

#include <cstdint>
#include <span>
#include <vector>

#include "bnmr/matrix.hpp"

namespace bnmr::nn {

/// Flat gradient aligned with the ClassifierParams layout.
struct GradVector {
  std::vector<double> values;

  GradVector() = default;
  explicit GradVector(std::size_t n) : values(n, 0.0) {}
  explicit GradVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double norm() const;
  double dot(const GradVector& other) const;
  GradVector& axpy(double a, const GradVector& x);  // this += a * x

  friend bool operator==(const GradVector&, const GradVector&) = default;
};

class ClassifierParams {
 public:
  ClassifierParams() = default;
  /// Throws ConfigError on invalid dims, ShapeError if `values` has the wrong length.
  ClassifierParams(std::vector<std::size_t> layer_dims, std::vector<double> values);

  static std::size_t parameter_count(std::span<const std::size_t> layer_dims);

  const std::vector<std::size_t>& layer_dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  /// Offset of layer l's weight block; its bias follows at
  /// weight_offset(l) + dims[l] * dims[l+1].
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  friend bool operator==(const ClassifierParams& a, const ClassifierParams& b) {
    return a.dims_ == b.dims_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
ClassifierParams init_classifier(std::span<const std::size_t> layer_dims, std::uint64_t seed);

/// sigmoid(logit) for one feature vector.
double forward(const ClassifierParams& params, std::span<const double> x);

/// Confidences for every row of `features`.
std::vector<double> predict_confidences(const ClassifierParams& params, const RealMatrix& features);

/// Thresholded (>= 0.5) predictions for every row of `features`.
std::vector<std::uint8_t> predict_labels(const ClassifierParams& params, const RealMatrix& features);

struct Sample {
  std::span<const double> x;
  int y = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  double confidence = 0.0;
  GradVector grad;
};

/// Binary cross-entropy and its exact parameter gradient, one entry per sample.
std::vector<LossAndGrad> per_sample_loss_and_grad(const ClassifierParams& params,
                                                  std::span<const Sample> batch);

struct ConfidenceAndGrad {
  double confidence = 0.0;
  GradVector grad;  // d confidence / d params
};

ConfidenceAndGrad confidence_and_grad(const ClassifierParams& params, std::span<const double> x);

/// theta - alpha * sum_i weights[i] * grads[i]; `params` is left untouched.
ClassifierParams lookahead(const ClassifierParams& params, std::span<const GradVector> grads,
                           std::span<const double> weights, double alpha);

/// Same arithmetic as lookahead; used for the committed update.
ClassifierParams sgd_step(const ClassifierParams& params, std::span<const GradVector> grads,
                          std::span<const double> weights, double alpha);

/// Lower bound applied inside the cross-entropy logarithms.
inline constexpr double kLogFloor = 1e-12;

}  // namespace bnmr::nn
