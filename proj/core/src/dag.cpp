#include "bnmr/dag.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "bnmr/errors.hpp"

namespace bnmr::bayes {

DagStructure::DagStructure(std::vector<std::string> node_names,
                           std::vector<std::vector<std::size_t>> parent_sets)
    : names_(std::move(node_names)), parents_(std::move(parent_sets)) {
  if (names_.size() != parents_.size()) {
    throw ConfigError("DAG has " + std::to_string(names_.size()) + " names but " +
                      std::to_string(parents_.size()) + " parent sets");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty() || n.find_first_of(" \t\r\n:") != std::string::npos) {
      throw ConfigError("invalid node name '" + n + "' (must be non-empty, no whitespace or ':')");
    }
    if (!seen.insert(n).second) throw ConfigError("duplicate node name '" + n + "'");
  }
  for (std::size_t i = 0; i < parents_.size(); ++i) {
    std::set<std::size_t> ps;
    for (auto p : parents_[i]) {
      if (p >= names_.size()) {
        throw ConfigError("node '" + names_[i] + "' has out-of-range parent index " + std::to_string(p));
      }
      if (p == i) throw ConfigError("node '" + names_[i] + "' lists itself as a parent");
      if (!ps.insert(p).second) {
        throw ConfigError("node '" + names_[i] + "' lists parent '" + names_[p] + "' twice");
      }
    }
  }
  (void)topological_order();
}

DagStructure DagStructure::empty(std::vector<std::string> node_names) {
  const auto n = node_names.size();
  return DagStructure(std::move(node_names), std::vector<std::vector<std::size_t>>(n));
}

DagStructure DagStructure::from_parent_masks(std::vector<std::string> node_names,
                                             std::span<const std::uint32_t> masks) {
  std::vector<std::vector<std::size_t>> ps(masks.size());
  for (std::size_t v = 0; v < masks.size(); ++v) {
    for (std::size_t p = 0; p < masks.size(); ++p) {
      if (masks[v] & (1u << p)) ps[v].push_back(p);
    }
  }
  return DagStructure(std::move(node_names), std::move(ps));
}

std::size_t DagStructure::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw ConfigError("unknown node '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

bool DagStructure::has_edge(std::size_t parent, std::size_t child) const {
  const auto& ps = parents_.at(child);
  return std::find(ps.begin(), ps.end(), parent) != ps.end();
}

std::size_t DagStructure::edge_count() const {
  std::size_t n = 0;
  for (const auto& ps : parents_) n += ps.size();
  return n;
}

std::vector<Edge> DagStructure::edges() const {
  std::vector<Edge> out;
  for (std::size_t c = 0; c < parents_.size(); ++c) {
    for (auto p : parents_[c]) out.emplace_back(p, c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> DagStructure::skeleton() const {
  std::vector<Edge> out;
  for (auto [p, c] : edges()) out.emplace_back(std::min(p, c), std::max(p, c));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> DagStructure::topological_order() const {
  const auto n = names_.size();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t c = 0; c < n; ++c) {
    indeg[c] = parents_[c].size();
    for (auto p : parents_[c]) children[p].push_back(c);
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t i = n; i-- > 0;) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    // Smallest ready index first keeps the order deterministic.
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const auto v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (auto c : children[v]) {
      if (--indeg[c] == 0) ready.push_back(c);
    }
  }
  if (order.size() != n) throw ConfigError("graph contains a directed cycle");
  return order;
}

DagStructure DagStructure::without_edge(std::size_t parent, std::size_t child) const {
  auto ps = parents_;
  auto& list = ps.at(child);
  list.erase(std::remove(list.begin(), list.end(), parent), list.end());
  return DagStructure(names_, std::move(ps));
}

namespace {

using Masks = std::array<std::uint32_t, kMaxExhaustiveNodes>;

struct DagWalker {
  std::size_t n;
  const std::function<void(std::span<const std::uint32_t>)>& visit;
  Masks parents{};
  std::uint64_t count = 0;

  // anc[v]: bitmask of ancestors of v using the edges assigned so far.
  void assign(std::size_t k, const Masks& anc) {
    if (k == n) {
      ++count;
      visit(std::span<const std::uint32_t>(parents.data(), n));
      return;
    }
    const std::uint32_t self = 1u << k;
    const std::uint32_t full = (1u << n) - 1;
    const std::uint32_t others = full & ~self;
    // Enumerate subsets of `others` in increasing numeric order.
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask & ~others) continue;
      std::uint32_t inherited = mask;
      bool cyclic = false;
      for (std::size_t p = 0; p < n && !cyclic; ++p) {
        if (!(mask & (1u << p))) continue;
        if (anc[p] & self) cyclic = true;
        inherited |= anc[p];
      }
      if (cyclic) continue;
      Masks next = anc;
      next[k] = inherited;
      for (std::size_t v = 0; v < n; ++v) {
        if (next[v] & self) next[v] |= inherited;
      }
      parents[k] = mask;
      assign(k + 1, next);
    }
    parents[k] = 0;
  }
};

void check_exhaustive_size(std::size_t n) {
  if (n < 1) throw ConfigError("DAG enumeration needs at least one node");
  if (n > kMaxExhaustiveNodes) {
    throw CapacityError("exhaustive structure search supports at most " +
                        std::to_string(kMaxExhaustiveNodes) + " nodes, got " + std::to_string(n) +
                        "; reduce the attribute count for exhaustive mode");
  }
}

}  // namespace

std::uint64_t for_each_dag(std::size_t n,
                           const std::function<void(std::span<const std::uint32_t>)>& visit) {
  check_exhaustive_size(n);
  DagWalker walker{n, visit};
  walker.assign(0, Masks{});
  return walker.count;
}

std::vector<DagStructure> enumerate_dags(std::size_t n, std::vector<std::string> node_names) {
  check_exhaustive_size(n);
  if (node_names.empty()) {
    for (std::size_t i = 0; i < n; ++i) node_names.push_back("X" + std::to_string(i));
  }
  if (node_names.size() != n) throw ConfigError("node name count does not match n");
  std::vector<DagStructure> out;
  for_each_dag(n, [&](std::span<const std::uint32_t> masks) {
    out.push_back(DagStructure::from_parent_masks(node_names, masks));
  });
  return out;
}

}  // namespace bnmr::bayes
