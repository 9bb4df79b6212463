#include "bnmr/kv_config.hpp"

#include <fstream>
#include <sstream>

#include "bnmr/errors.hpp"
#include "bnmr/strings.hpp"

namespace bnmr {

KvConfig KvConfig::parse(const std::string& text, const std::string& source) {
  KvConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + std::string(line) + "'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                        "' (first defined on line " +
                        std::to_string(cfg.entries_.at(key).line) + ")");
    }
    cfg.entries_[key] = Entry{std::move(value), line_no};
    cfg.order_.push_back(key);
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse(ss.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool KvConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KvConfig::where(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.line == 0) return source_ + ": key '" + key + "'";
  return source_ + ":" + std::to_string(it->second.line) + ": key '" + key + "'";
}

const KvConfig::Entry& KvConfig::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string KvConfig::get_string(const std::string& key) const { return entry(key).value; }

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KvConfig::get_double(const std::string& key) const {
  double v = 0;
  if (!parse_double(entry(key).value, v)) {
    throw ConfigError(where(key) + ": expected a real number, got '" + entry(key).value + "'");
  }
  return v;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KvConfig::get_int(const std::string& key) const {
  long long v = 0;
  if (!parse_int(entry(key).value, v)) {
    throw ConfigError(where(key) + ": expected an integer, got '" + entry(key).value + "'");
  }
  return v;
}

long long KvConfig::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = entry(key).value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(where(key) + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> KvConfig::get_list(const std::string& key) const {
  const auto& v = entry(key).value;
  if (trim(v).empty()) return {};
  auto parts = split(v, ',');
  for (const auto& p : parts) {
    if (p.empty()) throw ConfigError(where(key) + ": empty list element in '" + v + "'");
  }
  return parts;
}

std::vector<std::string> KvConfig::get_list(const std::string& key,
                                            const std::vector<std::string>& fallback) const {
  return has(key) ? get_list(key) : fallback;
}

std::vector<double> KvConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& p : get_list(key)) {
    double v = 0;
    if (!parse_double(p, v)) {
      throw ConfigError(where(key) + ": expected a real number, got '" + p + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::filesystem::path KvConfig::get_path(const std::string& key) const {
  std::filesystem::path p = get_string(key);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

std::vector<std::string> KvConfig::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& k : order_) {
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  }
  return out;
}

std::vector<std::string> KvConfig::keys() const { return order_; }

void KvConfig::reject_unknown(const std::set<std::string>& known,
                              const std::vector<std::string>& known_prefixes) const {
  for (const auto& k : order_) {
    if (known.count(k)) continue;
    bool ok = false;
    for (const auto& p : known_prefixes) {
      if (k.rfind(p, 0) == 0) ok = true;
    }
    if (!ok) throw ConfigError(where(k) + ": unknown key");
  }
}

void KvConfig::set(const std::string& key, const std::string& value) {
  if (!entries_.count(key)) order_.push_back(key);
  entries_[key] = Entry{value, 0};
}

}  // namespace bnmr
