#include "bnmr/fairmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bnmr/errors.hpp"
#include "bnmr/independence.hpp"
#include "bnmr/rng.hpp"
#include "bnmr/strings.hpp"

namespace bnmr::fair {

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) {
    throw ShapeError("length mismatch: " + std::to_string(a) + " predictions, " + std::to_string(b) +
                     " labels, " + std::to_string(c) + " attribute rows");
  }
}

// Partial Fisher-Yates: first `k` entries of a seeded permutation of `pool`.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

template <class Metric>
DisparityResult per_attribute(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels,
                              const BinaryMatrix& attributes, const std::vector<std::string>& names,
                              Metric metric) {
  check_lengths(predictions.size(), labels.size(), attributes.rows());
  if (attributes.cols() != names.size()) throw ShapeError("attribute names do not match attribute columns");
  DisparityResult out;
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < names.size(); ++c) {
    const auto col = attributes.column(c);
    const auto rates = group_rates(predictions, labels, col);
    if (!rates.defined()) {
      out.notes.push_back("attribute '" + names[c] + "' is one-sided among y=1 rows; excluded from the mean");
      continue;
    }
    const double v = metric(rates, names[c], out.notes);
    out.per_attribute[names[c]] = v;
    sum += v;
    ++defined;
  }
  if (defined) {
    out.mean = sum / static_cast<double>(defined);
  } else {
    out.notes.push_back("no attribute is defined; mean reported as 0");
  }
  return out;
}

}  // namespace

std::vector<MicroValidationSet> sample_micro_sets(const data::Dataset& validation,
                                                  const std::vector<std::string>& attributes,
                                                  std::size_t size_per_side, std::uint64_t seed) {
  if (size_per_side == 0) throw ConfigError("micro set size per side must be positive");
  std::vector<MicroValidationSet> out;
  for (std::size_t m = 0; m < attributes.size(); ++m) {
    MicroValidationSet set;
    set.attribute = attributes[m];
    set.attribute_column = validation.attribute_index(attributes[m]);
    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < validation.size(); ++r) {
      if (validation.labels[r] != 1) continue;
      (validation.attributes(r, set.attribute_column) ? pos : neg).push_back(r);
    }
    for (const auto& [side, pool] : {std::pair{"A=1", &pos}, std::pair{"A=0", &neg}}) {
      if (pool->size() < size_per_side) {
        throw SamplingError("micro set for attribute '" + attributes[m] + "' needs " +
                            std::to_string(size_per_side) + " rows with y=1 and " + side + ", found " +
                            std::to_string(pool->size()) + " (deficit " +
                            std::to_string(size_per_side - pool->size()) + ")");
      }
    }
    auto rng = make_rng(seed, Stream::kMicroSets, m);
    set.pos_rows = draw_without_replacement(std::move(pos), size_per_side, rng);
    set.neg_rows = draw_without_replacement(std::move(neg), size_per_side, rng);
    out.push_back(std::move(set));
  }
  return out;
}

GroupRates group_rates(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels,
                       std::span<const std::uint8_t> attribute) {
  check_lengths(predictions.size(), labels.size(), attribute.size());
  GroupRates r;
  std::size_t hit_pos = 0, hit_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    if (attribute[i]) {
      ++r.n_pos;
      hit_pos += predictions[i] ? 1 : 0;
    } else {
      ++r.n_neg;
      hit_neg += predictions[i] ? 1 : 0;
    }
  }
  if (r.n_pos) r.tpr_pos = static_cast<double>(hit_pos) / static_cast<double>(r.n_pos);
  if (r.n_neg) r.tpr_neg = static_cast<double>(hit_neg) / static_cast<double>(r.n_neg);
  return r;
}

double tpr_disparity(const GroupRates& r) { return std::abs(r.tpr_pos - r.tpr_neg); }

double disparate_impact_gap(const GroupRates& r, bool* degenerate) {
  if (degenerate) *degenerate = false;
  const double a = r.tpr_pos, b = r.tpr_neg;
  if (a == 0.0 && b == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  if (a == 0.0 || b == 0.0) return 1.0;
  const double gap = std::max(std::abs(1.0 - a / b), std::abs(1.0 - b / a));
  return std::min(1.0, gap);
}

DisparityResult tprd(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels,
                     const BinaryMatrix& attributes, const std::vector<std::string>& names) {
  return per_attribute(predictions, labels, attributes, names,
                       [](const GroupRates& r, const std::string&, std::vector<std::string>&) {
                         return tpr_disparity(r);
                       });
}

DisparityResult dig(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels,
                    const BinaryMatrix& attributes, const std::vector<std::string>& names) {
  return per_attribute(predictions, labels, attributes, names,
                       [](const GroupRates& r, const std::string& name, std::vector<std::string>& notes) {
                         bool degenerate = false;
                         const double v = disparate_impact_gap(r, &degenerate);
                         if (degenerate) notes.push_back("attribute '" + name + "': both TPRs are 0 (DIG set to 0)");
                         return v;
                       });
}

DemographicResult demographic_report(std::span<const std::uint8_t> predictions,
                                     std::span<const std::uint8_t> labels,
                                     std::span<const std::uint8_t> demographic) {
  const auto r = group_rates(predictions, labels, demographic);
  DemographicResult out;
  out.defined = r.defined();
  if (!out.defined) return out;
  out.tprd = tpr_disparity(r);
  out.dig = disparate_impact_gap(r);
  return out;
}

PhiMatrix phi_matrix(const BinaryMatrix& columns, const std::vector<std::string>& names) {
  if (columns.cols() != names.size()) throw ShapeError("phi matrix: names do not match columns");
  const auto k = names.size();
  PhiMatrix out{names, Matrix<double>(k, k, 0.0), {}};
  std::vector<bool> constant(k, false);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t ones = 0;
    for (std::size_t r = 0; r < columns.rows(); ++r) {
      if (columns(r, c) > 1) throw DataError("phi matrix: column '" + names[c] + "' is not binary");
      ones += columns(r, c);
    }
    constant[c] = ones == 0 || ones == columns.rows();
    if (constant[c]) out.degenerate.push_back(names[c]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (constant[i]) continue;
    out.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (constant[j]) continue;
      const double phi = bayes::chi2_independence(columns, i, j).phi;
      out.values(i, j) = phi;
      out.values(j, i) = phi;
    }
  }
  return out;
}

std::string phi_to_csv(const PhiMatrix& phi) {
  std::string out = "attribute";
  for (const auto& n : phi.names) out += "," + n;
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < phi.names.size(); ++i) {
    out += phi.names[i];
    for (std::size_t j = 0; j < phi.names.size(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.4f", phi.values(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

FairnessReport evaluate_predictions(std::span<const std::uint8_t> predictions,
                                    std::span<const std::uint8_t> labels, const BinaryMatrix& attributes,
                                    const std::vector<std::string>& names) {
  check_lengths(predictions.size(), labels.size(), attributes.rows());
  FairnessReport rep;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += (predictions[i] == labels[i]) ? 1 : 0;
  rep.accuracy = labels.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(labels.size());
  auto t = tprd(predictions, labels, attributes, names);
  auto d = dig(predictions, labels, attributes, names);
  rep.per_attribute_tprd = std::move(t.per_attribute);
  rep.mean_tprd = t.mean;
  rep.per_attribute_dig = std::move(d.per_attribute);
  rep.mean_dig = d.mean;
  rep.notes = std::move(t.notes);
  for (auto& n : d.notes) {
    if (std::find(rep.notes.begin(), rep.notes.end(), n) == rep.notes.end()) rep.notes.push_back(std::move(n));
  }
  return rep;
}

std::string report_to_text(const FairnessReport& r) {
  std::ostringstream out;
  out << "accuracy=" << format_double(r.accuracy) << '\n';
  out << "mean_tprd=" << format_double(r.mean_tprd) << '\n';
  out << "mean_dig=" << format_double(r.mean_dig) << '\n';
  for (const auto& [k, v] : r.per_attribute_tprd) out << "per_attribute.tprd." << k << '=' << format_double(v) << '\n';
  for (const auto& [k, v] : r.per_attribute_dig) out << "per_attribute.dig." << k << '=' << format_double(v) << '\n';
  if (r.demographic_name) out << "demographic.attribute=" << *r.demographic_name << '\n';
  if (r.demographic) {
    if (r.demographic->defined) {
      out << "demographic.tprd=" << format_double(r.demographic->tprd) << '\n';
      out << "demographic.dig=" << format_double(r.demographic->dig) << '\n';
    } else {
      out << "demographic.undefined=true\n";
    }
  }
  if (r.phi) {
    const auto& p = *r.phi;
    for (std::size_t i = 0; i < p.names.size(); ++i) {
      for (std::size_t j = 0; j < p.names.size(); ++j) {
        out << "phi." << p.names[i] << '.' << p.names[j] << '=' << format_double(p.values(i, j)) << '\n';
      }
    }
  }
  for (std::size_t i = 0; i < r.notes.size(); ++i) out << "note." << i << '=' << r.notes[i] << '\n';
  return out.str();
}

}  // namespace bnmr::fair
