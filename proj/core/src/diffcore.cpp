#include "bnmr/diffcore.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "bnmr/errors.hpp"
#include "bnmr/rng.hpp"

namespace bnmr::nn {

namespace {

void validate_dims(std::span<const std::size_t> dims) {
  if (dims.size() < 2) throw ConfigError("classifier needs at least 2 layer dims");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) {
      throw ConfigError("classifier layer dim " + std::to_string(i) + " must be positive");
    }
  }
  if (dims.back() != 1) throw ConfigError("classifier output dim must be 1 (a single logit)");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Keeps the reported confidence inside the open interval even when the
// logit saturates the double-precision sigmoid.
double open_unit(double p) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  return p < lo ? lo : (p > hi ? hi : p);
}

void check_input(const ClassifierParams& params, std::span<const double> x) {
  if (x.size() != params.input_dim()) {
    throw ShapeError("feature vector has length " + std::to_string(x.size()) + ", classifier expects " +
                     std::to_string(params.input_dim()));
  }
}

// Forward pass keeping every layer's activation; returns the logit.
double forward_cached(const ClassifierParams& params, std::span<const double> x,
                      std::vector<std::vector<double>>& acts) {
  const auto& dims = params.layer_dims();
  const auto v = params.values();
  const std::size_t layers = dims.size() - 1;
  acts.resize(dims.size());
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = dims[l], out = dims[l + 1];
    const double* w = v.data() + params.weight_offset(l);
    const double* b = w + in * out;
    auto& next = acts[l + 1];
    next.assign(out, 0.0);
    const auto& cur = acts[l];
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += row[i] * cur[i];
      next[o] = (l + 1 < layers) ? (z > 0.0 ? z : 0.0) : z;
    }
  }
  return acts[layers][0];
}

// d logit / d params, scaled by `scale`, written into `grad`.
void backward_logit(const ClassifierParams& params, const std::vector<std::vector<double>>& acts,
                    double scale, GradVector& grad) {
  const auto& dims = params.layer_dims();
  const auto v = params.values();
  const std::size_t layers = dims.size() - 1;
  grad.values.assign(params.size(), 0.0);
  std::vector<double> delta{scale};
  std::vector<double> prev;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = dims[l], out = dims[l + 1];
    const std::size_t woff = params.weight_offset(l);
    const double* w = v.data() + woff;
    double* gw = grad.values.data() + woff;
    double* gb = gw + in * out;
    const auto& a = acts[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] = d;
      if (d == 0.0) continue;
      double* grow = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] = d * a[i];
    }
    if (l == 0) break;
    prev.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * d;
    }
    // acts[l] is a ReLU output for l >= 1; its derivative is 0 where it is 0.
    for (std::size_t i = 0; i < in; ++i) {
      if (a[i] <= 0.0) prev[i] = 0.0;
    }
    delta.swap(prev);
  }
}

ClassifierParams weighted_step(const ClassifierParams& params, std::span<const GradVector> grads,
                               std::span<const double> weights, double alpha) {
  if (grads.size() != weights.size()) {
    throw ShapeError("got " + std::to_string(grads.size()) + " gradients but " +
                     std::to_string(weights.size()) + " weights");
  }
  if (!(alpha > 0.0)) throw ConfigError("step size must be positive");
  ClassifierParams out = params;
  auto dst = out.mutable_values();
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].size() != params.size()) {
      throw ShapeError("gradient " + std::to_string(i) + " has length " +
                       std::to_string(grads[i].size()) + ", expected " + std::to_string(params.size()));
    }
    const double c = alpha * weights[i];
    if (c == 0.0) continue;
    const auto& g = grads[i].values;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] -= c * g[k];
  }
  return out;
}

}  // namespace

double GradVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double GradVector::dot(const GradVector& other) const {
  if (other.size() != size()) throw ShapeError("gradient length mismatch in dot product");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * other.values[i];
  return s;
}

GradVector& GradVector::axpy(double a, const GradVector& x) {
  if (x.size() != size()) throw ShapeError("gradient length mismatch in axpy");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += a * x.values[i];
  return *this;
}

ClassifierParams::ClassifierParams(std::vector<std::size_t> layer_dims, std::vector<double> values)
    : dims_(std::move(layer_dims)), values_(std::move(values)) {
  validate_dims(dims_);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(off);
    off += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
  if (values_.size() != off) {
    throw ShapeError("classifier expects " + std::to_string(off) + " parameters, got " +
                     std::to_string(values_.size()));
  }
}

std::size_t ClassifierParams::parameter_count(std::span<const std::size_t> layer_dims) {
  validate_dims(layer_dims);
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    n += layer_dims[l] * layer_dims[l + 1] + layer_dims[l + 1];
  }
  return n;
}

ClassifierParams init_classifier(std::span<const std::size_t> layer_dims, std::uint64_t seed) {
  const std::size_t n = ClassifierParams::parameter_count(layer_dims);
  std::vector<double> values(n, 0.0);
  auto rng = make_rng(seed, Stream::kInit);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t in = layer_dims[l], out = layer_dims[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (std::size_t k = 0; k < in * out; ++k) values[off + k] = dist(rng);
    off += in * out + out;
  }
  return ClassifierParams({layer_dims.begin(), layer_dims.end()}, std::move(values));
}

double forward(const ClassifierParams& params, std::span<const double> x) {
  check_input(params, x);
  std::vector<std::vector<double>> acts;
  return open_unit(sigmoid(forward_cached(params, x, acts)));
}

std::vector<double> predict_confidences(const ClassifierParams& params, const RealMatrix& features) {
  std::vector<double> out(features.rows());
  std::vector<std::vector<double>> acts;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto x = features.row(r);
    check_input(params, x);
    out[r] = open_unit(sigmoid(forward_cached(params, x, acts)));
  }
  return out;
}

std::vector<std::uint8_t> predict_labels(const ClassifierParams& params, const RealMatrix& features) {
  const auto conf = predict_confidences(params, features);
  std::vector<std::uint8_t> out(conf.size());
  for (std::size_t i = 0; i < conf.size(); ++i) out[i] = conf[i] >= 0.5 ? 1 : 0;
  return out;
}

std::vector<LossAndGrad> per_sample_loss_and_grad(const ClassifierParams& params,
                                                  std::span<const Sample> batch) {
  if (batch.empty()) throw DataError("per-sample gradients need a non-empty batch");
  std::vector<LossAndGrad> out(batch.size());
  std::vector<std::vector<double>> acts;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& s = batch[i];
    check_input(params, s.x);
    for (double v : s.x) {
      if (std::isnan(v)) throw DataError("NaN in feature vector of batch sample " + std::to_string(i));
    }
    if (s.y != 0 && s.y != 1) {
      throw DataError("label of batch sample " + std::to_string(i) + " is not binary");
    }
    const double p = sigmoid(forward_cached(params, s.x, acts));
    const double y = s.y;
    const double loss = -(y * std::log(std::max(p, kLogFloor)) +
                          (1.0 - y) * std::log(std::max(1.0 - p, kLogFloor)));
    out[i].loss = loss;
    out[i].confidence = open_unit(p);
    backward_logit(params, acts, p - y, out[i].grad);
  }
  return out;
}

ConfidenceAndGrad confidence_and_grad(const ClassifierParams& params, std::span<const double> x) {
  check_input(params, x);
  std::vector<std::vector<double>> acts;
  const double p = sigmoid(forward_cached(params, x, acts));
  ConfidenceAndGrad out;
  out.confidence = open_unit(p);
  backward_logit(params, acts, p * (1.0 - p), out.grad);
  return out;
}

ClassifierParams lookahead(const ClassifierParams& params, std::span<const GradVector> grads,
                           std::span<const double> weights, double alpha) {
  return weighted_step(params, grads, weights, alpha);
}

ClassifierParams sgd_step(const ClassifierParams& params, std::span<const GradVector> grads,
                          std::span<const double> weights, double alpha) {
  return weighted_step(params, grads, weights, alpha);
}

}  // namespace bnmr::nn
