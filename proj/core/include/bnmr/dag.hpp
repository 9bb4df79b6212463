#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bnmr::bayes {

using Edge = std::pair<std::size_t, std::size_t>;  // (parent, child)

/// Named DAG. Construction validates indices, duplicates and acyclicity.
class DagStructure {
 public:
  DagStructure() = default;
  DagStructure(std::vector<std::string> node_names, std::vector<std::vector<std::size_t>> parent_sets);

  /// Graph with no edges.
  static DagStructure empty(std::vector<std::string> node_names);
  /// Builds parent lists (ascending) from one bitmask per node.
  static DagStructure from_parent_masks(std::vector<std::string> node_names,
                                        std::span<const std::uint32_t> masks);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& node_names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
  const std::vector<std::vector<std::size_t>>& parent_sets() const { return parents_; }

  /// Throws ConfigError if the name is unknown.
  std::size_t index_of(const std::string& name) const;
  bool has_edge(std::size_t parent, std::size_t child) const;
  std::size_t edge_count() const;
  /// Sorted (parent, child) pairs.
  std::vector<Edge> edges() const;
  /// Undirected edges as (min, max), sorted.
  std::vector<Edge> skeleton() const;
  std::vector<std::size_t> topological_order() const;

  DagStructure without_edge(std::size_t parent, std::size_t child) const;

  friend bool operator==(const DagStructure&, const DagStructure&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> parents_;
};

inline constexpr std::size_t kMaxExhaustiveNodes = 6;

/// Calls `visit` once for every labeled DAG on n nodes, passing one parent
/// bitmask per node. Returns the number of DAGs visited.
std::uint64_t for_each_dag(std::size_t n,
                           const std::function<void(std::span<const std::uint32_t>)>& visit);

/// Every labeled DAG on n nodes (1 <= n <= 6). Nodes are named X0..X{n-1}
/// unless names are supplied.
std::vector<DagStructure> enumerate_dags(std::size_t n, std::vector<std::string> node_names = {});

}  // namespace bnmr::bayes
