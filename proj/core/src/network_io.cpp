#include "bnmr/network_io.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "bnmr/errors.hpp"
#include "bnmr/strings.hpp"

namespace bnmr::bayes {

std::string to_text(const BayesianNetwork& bn) {
  const auto& s = bn.structure();
  std::ostringstream out;
  out << "nodes:";
  for (const auto& n : s.node_names()) out << ' ' << n;
  out << '\n';
  for (std::size_t v = 0; v < s.size(); ++v) {
    out << "parents " << s.name(v) << ':';
    for (auto p : s.parents(v)) out << ' ' << s.name(p);
    out << '\n';
  }
  for (std::size_t v = 0; v < s.size(); ++v) {
    out << "cpt " << s.name(v) << ':';
    for (double p : bn.cpt(v).table) out << ' ' << format_double(p);
    out << '\n';
  }
  if (bn.prediction_node()) out << "prediction: " << s.name(*bn.prediction_node()) << '\n';
  return out.str();
}

BayesianNetwork network_from_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::vector<std::string>> parents;
  std::map<std::string, std::vector<double>> tables;
  std::optional<std::string> prediction;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(source + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw fail("expected '<keyword> ...: values'");
    const auto head = split_ws(line.substr(0, colon));
    const auto tail = split_ws(line.substr(colon + 1));
    if (head.empty()) throw fail("missing keyword");
    const auto& kw = head[0];
    if (kw == "nodes") {
      if (!names.empty()) throw fail("duplicate 'nodes' line");
      if (tail.empty()) throw fail("'nodes' line lists no nodes");
      names = tail;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (!index.emplace(names[i], i).second) throw fail("duplicate node '" + names[i] + "'");
      }
      continue;
    }
    if (kw == "prediction") {
      if (tail.size() != 1) throw fail("'prediction' expects exactly one node name");
      prediction = tail[0];
      continue;
    }
    if (head.size() != 2) throw fail("expected '" + kw + " <node>:'");
    if (names.empty()) throw fail("'nodes' line must come first");
    const auto& node = head[1];
    if (!index.count(node)) throw fail("unknown node '" + node + "'");
    if (kw == "parents") {
      if (parents.count(node)) throw fail("duplicate parents line for '" + node + "'");
      for (const auto& p : tail) {
        if (!index.count(p)) throw fail("unknown parent '" + p + "'");
      }
      parents[node] = tail;
    } else if (kw == "cpt") {
      if (tables.count(node)) throw fail("duplicate cpt line for '" + node + "'");
      std::vector<double> t;
      for (const auto& tok : tail) {
        double v = 0;
        if (!parse_double(tok, v)) throw fail("malformed probability '" + tok + "'");
        t.push_back(v);
      }
      tables[node] = std::move(t);
    } else {
      throw fail("unknown keyword '" + kw + "'");
    }
  }
  if (names.empty()) throw ParseError(source + ": missing 'nodes' line");

  std::vector<std::vector<std::size_t>> parent_sets(names.size());
  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < names.size(); ++v) {
    const auto& n = names[v];
    if (!parents.count(n)) throw ParseError(source + ": missing parents line for '" + n + "'");
    if (!tables.count(n)) throw ParseError(source + ": missing cpt line for '" + n + "'");
    for (const auto& p : parents[n]) parent_sets[v].push_back(index[p]);
    cpts.push_back(Cpt{v, parent_sets[v], tables[n]});
  }
  std::optional<std::size_t> pred;
  if (prediction) {
    if (!index.count(*prediction)) throw ParseError(source + ": unknown prediction node '" + *prediction + "'");
    pred = index[*prediction];
  }
  try {
    return BayesianNetwork(DagStructure(names, std::move(parent_sets)), std::move(cpts), pred);
  } catch (const ConfigError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

void save_network(const BayesianNetwork& bn, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write network file '" + path.string() + "'");
  out << to_text(bn);
}

BayesianNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open network file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return network_from_text(ss.str(), path.string());
}

}  // namespace bnmr::bayes
