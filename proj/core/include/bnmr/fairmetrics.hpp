#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnmr/dataset.hpp"
#include "bnmr/matrix.hpp"

namespace bnmr::fair {

/// Balanced positive-label sample for one attribute: `pos_rows` have A=1,
/// `neg_rows` have A=0, every row has y=1.
struct MicroValidationSet {
  std::string attribute;
  std::size_t attribute_column = 0;  // column in the source dataset
  std::vector<std::size_t> pos_rows;
  std::vector<std::size_t> neg_rows;

  std::size_t size_per_side() const { return pos_rows.size(); }
};

/// One set per attribute, sampled without replacement. Throws SamplingError
/// naming the attribute and the deficit when a side is short.
std::vector<MicroValidationSet> sample_micro_sets(const data::Dataset& validation,
                                                  const std::vector<std::string>& attributes,
                                                  std::size_t size_per_side, std::uint64_t seed);

/// True positive rates of the two attribute groups among y=1 rows.
struct GroupRates {
  double tpr_pos = 0.0;  // A = 1
  double tpr_neg = 0.0;  // A = 0
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  bool defined() const { return n_pos > 0 && n_neg > 0; }
};

GroupRates group_rates(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels,
                       std::span<const std::uint8_t> attribute);

/// |TPR(A=1) - TPR(A=0)|.
double tpr_disparity(const GroupRates& r);

/// max over ordered pairs of |1 - TPR(a1)/TPR(a2)|, clamped to [0, 1].
/// A zero denominator gives 1 (or 0 with `degenerate` set when both are 0).
double disparate_impact_gap(const GroupRates& r, bool* degenerate = nullptr);

struct DisparityResult {
  std::map<std::string, double> per_attribute;
  double mean = 0.0;
  std::vector<std::string> notes;
};

/// Hard-prediction TPRD over the given attribute columns. Attributes that
/// are one-sided among y=1 rows are excluded from the mean with a note.
DisparityResult tprd(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels,
                     const BinaryMatrix& attributes, const std::vector<std::string>& names);

DisparityResult dig(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels,
                    const BinaryMatrix& attributes, const std::vector<std::string>& names);

struct DemographicResult {
  double tprd = 0.0;
  double dig = 0.0;
  bool defined = true;
};

DemographicResult demographic_report(std::span<const std::uint8_t> predictions,
                                     std::span<const std::uint8_t> labels,
                                     std::span<const std::uint8_t> demographic);

struct PhiMatrix {
  std::vector<std::string> names;
  Matrix<double> values;
  std::vector<std::string> degenerate;  // constant columns, filled with 0
};

/// Pairwise phi coefficients; diagonal 1 except for constant columns.
PhiMatrix phi_matrix(const BinaryMatrix& columns, const std::vector<std::string>& names);
std::string phi_to_csv(const PhiMatrix& phi);

struct FairnessReport {
  double accuracy = 0.0;
  std::map<std::string, double> per_attribute_tprd;
  double mean_tprd = 0.0;
  std::map<std::string, double> per_attribute_dig;
  double mean_dig = 0.0;
  std::optional<DemographicResult> demographic;
  std::optional<std::string> demographic_name;
  std::optional<PhiMatrix> phi;
  std::vector<std::string> notes;
};

/// Evaluates accuracy, TPRD and DIG of hard predictions.
FairnessReport evaluate_predictions(std::span<const std::uint8_t> predictions,
                                    std::span<const std::uint8_t> labels, const BinaryMatrix& attributes,
                                    const std::vector<std::string>& names);

/// key=value text: accuracy, mean_tprd, mean_dig, per_attribute.tprd.<name>,
/// per_attribute.dig.<name>, demographic.*, phi.<a>.<b>, note.<i>.
std::string report_to_text(const FairnessReport& report);

}  // namespace bnmr::fair
