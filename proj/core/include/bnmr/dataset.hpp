#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnmr/matrix.hpp"

namespace bnmr::data {

/// Rows of (features x, binary target y, binary attribute vector a).
struct Dataset {
  std::vector<std::string> ids;
  RealMatrix features;
  std::vector<std::uint8_t> labels;
  BinaryMatrix attributes;
  std::vector<std::string> attribute_names;
  std::string target_name = "target";

  std::size_t size() const { return labels.size(); }
  std::size_t feature_dim() const { return features.cols(); }

  /// Throws DataError/ConfigError if row counts or names are inconsistent.
  void validate() const;
  std::size_t attribute_index(const std::string& name) const;
  bool has_attribute(const std::string& name) const;
  /// Columns of the named attributes, in the given order.
  BinaryMatrix attribute_columns(const std::vector<std::string>& names) const;
  std::vector<std::uint8_t> attribute_column(const std::string& name) const;
  Dataset select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// CSV layout for datasets with real-valued features:
///   id,x0,...,x{d-1},y:<target>,a:<attr>,...
void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);
std::string dataset_to_csv(const Dataset& ds);
Dataset read_dataset_csv(const std::filesystem::path& path);
Dataset dataset_from_csv(const std::string& text, const std::string& source = "<string>");

/// Raw +-1 annotation table (list_attr_celeba layout), values mapped to 0/1.
struct AttributeTable {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  BinaryMatrix values;

  std::size_t column(const std::string& name) const;
};

AttributeTable read_attribute_table(const std::filesystem::path& path);
AttributeTable attribute_table_from_text(const std::string& text, const std::string& source = "<string>");
void write_attribute_table(const AttributeTable& table, const std::filesystem::path& path);

/// Builds a Dataset from an annotation table: `target_name` becomes y, the
/// named attributes become the attribute matrix, and the feature matrix is
/// `feature_names` (default: every remaining column) as 0/1 reals.
Dataset dataset_from_table(const AttributeTable& table, const std::string& target_name,
                           const std::vector<std::string>& attribute_names,
                           const std::optional<std::vector<std::string>>& feature_names = std::nullopt);

Dataset load_attribute_csv(const std::filesystem::path& path, const std::string& target_name,
                           const std::vector<std::string>& attribute_names,
                           const std::optional<std::vector<std::string>>& feature_names = std::nullopt);

/// Binary columns from either layout: the +-1 annotation layout when the
/// first line is a bare row count, otherwise the dataset CSV layout (target
/// column first, then attributes).
AttributeTable load_any_attribute_table(const std::filesystem::path& path);

struct Splits {
  Dataset train, val, test;
};

/// Seeded shuffle into train/val/test by ratio; rows keep their original
/// relative order inside each split.
Splits split_by_ratio(const Dataset& ds, std::array<double, 3> ratios, std::uint64_t seed);

/// list_eval_partition layout: "<id> <0|1|2>" per line (0 train, 1 val, 2 test).
Splits split_by_partition(const Dataset& ds, const std::filesystem::path& partition_file);
Splits split_by_partition_text(const Dataset& ds, const std::string& text,
                               const std::string& source = "<string>");

}  // namespace bnmr::data
