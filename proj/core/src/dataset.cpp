#include "bnmr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "bnmr/errors.hpp"
#include "bnmr/rng.hpp"
#include "bnmr/strings.hpp"

namespace bnmr::data {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::size_t find_name(const std::vector<std::string>& names, const std::string& name, const std::string& what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown " + what + " '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

void Dataset::validate() const {
  const auto n = labels.size();
  if (features.rows() != n || attributes.rows() != n || ids.size() != n) {
    throw DataError("dataset row counts disagree: " + std::to_string(ids.size()) + " ids, " +
                    std::to_string(features.rows()) + " feature rows, " + std::to_string(n) + " labels, " +
                    std::to_string(attributes.rows()) + " attribute rows");
  }
  if (attributes.cols() != attribute_names.size()) {
    throw DataError("attribute matrix has " + std::to_string(attributes.cols()) + " columns but " +
                    std::to_string(attribute_names.size()) + " names");
  }
  std::set<std::string> seen;
  for (const auto& a : attribute_names) {
    if (!seen.insert(a).second) throw ConfigError("duplicate attribute name '" + a + "'");
  }
  if (seen.count(target_name)) throw ConfigError("target '" + target_name + "' is also an attribute");
  for (auto y : labels) {
    if (y > 1) throw DataError("dataset label is not binary");
  }
}

std::size_t Dataset::attribute_index(const std::string& name) const {
  return find_name(attribute_names, name, "attribute");
}

bool Dataset::has_attribute(const std::string& name) const {
  return std::find(attribute_names.begin(), attribute_names.end(), name) != attribute_names.end();
}

BinaryMatrix Dataset::attribute_columns(const std::vector<std::string>& names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(attribute_index(n));
  return attributes.select_cols(idx);
}

std::vector<std::uint8_t> Dataset::attribute_column(const std::string& name) const {
  return attributes.column(attribute_index(name));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  out.attribute_names = attribute_names;
  out.target_name = target_name;
  out.features = features.select_rows(rows);
  out.attributes = attributes.select_rows(rows);
  out.labels.reserve(rows.size());
  out.ids.reserve(rows.size());
  for (auto r : rows) {
    out.labels.push_back(labels.at(r));
    out.ids.push_back(ids.at(r));
  }
  return out;
}

std::string dataset_to_csv(const Dataset& ds) {
  ds.validate();
  std::string out = "id";
  for (std::size_t j = 0; j < ds.feature_dim(); ++j) out += ",x" + std::to_string(j);
  out += ",y:" + ds.target_name;
  for (const auto& a : ds.attribute_names) out += ",a:" + a;
  out += '\n';
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out += ds.ids[r];
    for (double v : ds.features.row(r)) {
      out += ',';
      out += format_double(v);
    }
    out += ds.labels[r] ? ",1" : ",0";
    for (auto a : ds.attributes.row(r)) out += a ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  write_file(path, dataset_to_csv(ds));
}

Dataset dataset_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source + ": empty dataset file");
  const auto header = split(line, ',');
  if (header.empty() || header[0] != "id") throw ParseError(source + ":1: header must start with 'id'");
  Dataset ds;
  std::size_t dim = 0;
  bool have_target = false;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.rfind("y:", 0) == 0) {
      if (have_target) throw ParseError(source + ":1: more than one target column");
      ds.target_name = h.substr(2);
      have_target = true;
    } else if (h.rfind("a:", 0) == 0) {
      if (!have_target) throw ParseError(source + ":1: attribute columns must follow the target column");
      ds.attribute_names.push_back(h.substr(2));
    } else if (h == "x" + std::to_string(dim) && !have_target) {
      ++dim;
    } else {
      throw ParseError(source + ":1: unexpected column '" + h + "'");
    }
  }
  if (!have_target) throw ParseError(source + ":1: missing 'y:<target>' column");
  const std::size_t k = ds.attribute_names.size();
  std::vector<double> feats;
  std::vector<std::uint8_t> attrs;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    ds.ids.push_back(fields[0]);
    for (std::size_t j = 0; j < dim; ++j) {
      double v = 0;
      if (!parse_double(fields[1 + j], v)) {
        throw ParseError(source + ":" + std::to_string(line_no) + ": malformed feature value '" +
                         fields[1 + j] + "'");
      }
      feats.push_back(v);
    }
    auto binary = [&](const std::string& tok) -> std::uint8_t {
      if (tok == "0") return 0;
      if (tok == "1") return 1;
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected 0 or 1, got '" + tok + "'");
    };
    ds.labels.push_back(binary(fields[1 + dim]));
    for (std::size_t j = 0; j < k; ++j) attrs.push_back(binary(fields[2 + dim + j]));
  }
  const auto n = ds.labels.size();
  ds.features = RealMatrix(n, dim, std::move(feats));
  ds.attributes = BinaryMatrix(n, k, std::move(attrs));
  ds.validate();
  return ds;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  return dataset_from_csv(read_file(path), path.string());
}

std::size_t AttributeTable::column(const std::string& name) const {
  return find_name(names, name, "column");
}

AttributeTable attribute_table_from_text(const std::string& text, const std::string& source) {
  AttributeTable t;
  std::size_t pos = 0;
  int line_no = 0;
  auto next_line = [&](std::string_view& out) {
    if (pos >= text.size()) return false;
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    out = std::string_view(text).substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return true;
  };
  std::string_view line;
  if (!next_line(line)) throw ParseError(source + ": empty annotation file");
  long long declared = 0;
  if (!parse_int(line, declared) || declared < 0) {
    throw ParseError(source + ":1: expected the row count, got '" + std::string(trim(line)) + "'");
  }
  if (!next_line(line)) throw ParseError(source + ":2: missing attribute header");
  t.names = split_ws(line);
  if (t.names.empty()) throw ParseError(source + ":2: empty attribute header");
  const std::size_t k = t.names.size();
  std::vector<std::uint8_t> values;
  values.reserve(static_cast<std::size_t>(declared) * k);
  while (next_line(line)) {
    if (trim(line).empty()) continue;
    // Hand-rolled tokenizer: this runs over ~8M tokens for the full file.
    std::size_t i = 0, field = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      const auto start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      const auto tok = line.substr(start, i - start);
      if (field == 0) {
        t.ids.emplace_back(tok);
      } else if (field <= k) {
        if (tok == "1") {
          values.push_back(1);
        } else if (tok == "-1") {
          values.push_back(0);
        } else {
          throw ParseError(source + ":" + std::to_string(line_no) + ": malformed attribute value '" +
                           std::string(tok) + "' (expected 1 or -1)");
        }
      }
      ++field;
    }
    if (field != k + 1) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected an id and " + std::to_string(k) +
                       " values, got " + std::to_string(field) + " fields");
    }
  }
  if (t.ids.size() != static_cast<std::size_t>(declared)) {
    throw ParseError(source + ":1: header declares " + std::to_string(declared) + " rows but the file has " +
                     std::to_string(t.ids.size()));
  }
  t.values = BinaryMatrix(t.ids.size(), k, std::move(values));
  return t;
}

AttributeTable read_attribute_table(const std::filesystem::path& path) {
  return attribute_table_from_text(read_file(path), path.string());
}

void write_attribute_table(const AttributeTable& table, const std::filesystem::path& path) {
  std::string out = std::to_string(table.ids.size()) + "\n" + join(table.names, " ") + "\n";
  for (std::size_t r = 0; r < table.ids.size(); ++r) {
    out += table.ids[r];
    for (auto v : table.values.row(r)) out += v ? "  1" : " -1";
    out += '\n';
  }
  write_file(path, out);
}

Dataset dataset_from_table(const AttributeTable& table, const std::string& target_name,
                           const std::vector<std::string>& attribute_names,
                           const std::optional<std::vector<std::string>>& feature_names) {
  const auto target = table.column(target_name);
  std::vector<std::size_t> attr_idx;
  for (const auto& a : attribute_names) {
    if (a == target_name) throw ConfigError("target '" + a + "' cannot also be an attribute");
    attr_idx.push_back(table.column(a));
  }
  std::vector<std::size_t> feat_idx;
  if (feature_names) {
    for (const auto& f : *feature_names) feat_idx.push_back(table.column(f));
  } else {
    for (std::size_t c = 0; c < table.names.size(); ++c) {
      if (c == target) continue;
      if (std::find(attr_idx.begin(), attr_idx.end(), c) != attr_idx.end()) continue;
      feat_idx.push_back(c);
    }
  }
  const auto n = table.ids.size();
  Dataset ds;
  ds.ids = table.ids;
  ds.target_name = target_name;
  ds.attribute_names = attribute_names;
  ds.labels = table.values.column(target);
  ds.attributes = table.values.select_cols(attr_idx);
  ds.features = RealMatrix(n, feat_idx.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < feat_idx.size(); ++j) ds.features(r, j) = table.values(r, feat_idx[j]);
  }
  ds.validate();
  return ds;
}

Dataset load_attribute_csv(const std::filesystem::path& path, const std::string& target_name,
                           const std::vector<std::string>& attribute_names,
                           const std::optional<std::vector<std::string>>& feature_names) {
  return dataset_from_table(read_attribute_table(path), target_name, attribute_names, feature_names);
}

AttributeTable load_any_attribute_table(const std::filesystem::path& path) {
  const auto text = read_file(path);
  const auto first = trim(std::string_view(text).substr(0, text.find('\n')));
  long long n = 0;
  if (parse_int(first, n)) return attribute_table_from_text(text, path.string());
  const auto ds = dataset_from_csv(text, path.string());
  AttributeTable t;
  t.ids = ds.ids;
  t.names.push_back(ds.target_name);
  for (const auto& a : ds.attribute_names) t.names.push_back(a);
  t.values = BinaryMatrix(ds.size(), t.names.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    t.values(r, 0) = ds.labels[r];
    for (std::size_t j = 0; j < ds.attribute_names.size(); ++j) t.values(r, j + 1) = ds.attributes(r, j);
  }
  return t;
}

Splits split_by_ratio(const Dataset& ds, std::array<double, 3> ratios, std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  const auto n = ds.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto rng = make_rng(seed, Stream::kSplit);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * static_cast<double>(n)));
  const auto n_val = std::min(n - std::min(n, n_train),
                              static_cast<std::size_t>(std::llround(ratios[1] * static_cast<double>(n))));
  const auto cut1 = std::min(n, n_train);
  const auto cut2 = cut1 + n_val;
  std::vector<std::size_t> a(perm.begin(), perm.begin() + cut1);
  std::vector<std::size_t> b(perm.begin() + cut1, perm.begin() + cut2);
  std::vector<std::size_t> c(perm.begin() + cut2, perm.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::sort(c.begin(), c.end());
  return {ds.select_rows(a), ds.select_rows(b), ds.select_rows(c)};
}

Splits split_by_partition_text(const Dataset& ds, const std::string& text, const std::string& source) {
  std::map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < ds.size(); ++r) row_of.emplace(ds.ids[r], r);
  std::vector<int> part(ds.size(), -1);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no);
    if (tok.size() != 2) throw ParseError(where + ": expected '<id> <0|1|2>'");
    auto it = row_of.find(tok[0]);
    if (it == row_of.end()) throw ParseError(where + ": unknown id '" + tok[0] + "'");
    if (tok[1] != "0" && tok[1] != "1" && tok[1] != "2") {
      throw ParseError(where + ": partition must be 0, 1 or 2, got '" + tok[1] + "'");
    }
    part[it->second] = tok[1][0] - '0';
  }
  std::array<std::vector<std::size_t>, 3> rows;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (part[r] < 0) throw ParseError(source + ": id '" + ds.ids[r] + "' has no partition entry");
    rows[static_cast<std::size_t>(part[r])].push_back(r);
  }
  return {ds.select_rows(rows[0]), ds.select_rows(rows[1]), ds.select_rows(rows[2])};
}

Splits split_by_partition(const Dataset& ds, const std::filesystem::path& partition_file) {
  return split_by_partition_text(ds, read_file(partition_file), partition_file.string());
}

}  // namespace bnmr::data
