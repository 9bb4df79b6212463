#include "bnmr/structure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bnmr/errors.hpp"

namespace bnmr::bayes {

void require_binary(const BinaryMatrix& data, const std::string& what) {
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (data(r, c) > 1) {
        throw DataError(what + ": non-binary value " + std::to_string(int(data(r, c))) + " at row " +
                        std::to_string(r) + ", column " + std::to_string(c));
      }
    }
  }
}

LogFactorialTable::LogFactorialTable(std::size_t max) : table_(max + 1, 0.0) {
  for (std::size_t k = 2; k <= max; ++k) table_[k] = table_[k - 1] + std::log(static_cast<double>(k));
}

namespace {

double k2_from_counts(const std::vector<std::size_t>& counts, const LogFactorialTable& lf) {
  // counts laid out as [config * 2 + value]; log((r-1)!) = log(1!) = 0.
  double s = 0.0;
  for (std::size_t j = 0; j < counts.size() / 2; ++j) {
    const auto n0 = counts[2 * j], n1 = counts[2 * j + 1];
    s += lf(n0) + lf(n1) - lf(n0 + n1 + 1);
  }
  return s;
}

// Histogram of full-row bit patterns; rows are at most 6 columns wide here.
std::vector<std::size_t> pattern_histogram(const BinaryMatrix& data) {
  std::vector<std::size_t> hist(std::size_t{1} << data.cols(), 0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    std::size_t m = 0;
    for (std::size_t c = 0; c < data.cols(); ++c) m |= std::size_t{data(r, c)} << c;
    ++hist[m];
  }
  return hist;
}

double local_from_histogram(const std::vector<std::size_t>& hist, std::size_t node,
                            std::uint32_t parent_mask, std::size_t n_nodes, const LogFactorialTable& lf) {
  std::vector<std::size_t> parents;
  for (std::size_t p = 0; p < n_nodes; ++p) {
    if (parent_mask & (1u << p)) parents.push_back(p);
  }
  std::vector<std::size_t> counts(std::size_t{2} << parents.size(), 0);
  for (std::size_t m = 0; m < hist.size(); ++m) {
    if (!hist[m]) continue;
    std::size_t j = 0;
    for (std::size_t b = 0; b < parents.size(); ++b) j |= ((m >> parents[b]) & 1u) << b;
    counts[2 * j + ((m >> node) & 1u)] += hist[m];
  }
  return k2_from_counts(counts, lf);
}

bool lexicographically_smaller(const std::vector<Edge>& a, const std::vector<Edge>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

double k2_local_score(const BinaryMatrix& data, std::size_t node, const std::vector<std::size_t>& parents,
                      const LogFactorialTable& lf) {
  if (parents.size() >= 8 * sizeof(std::size_t) - 1) throw CapacityError("too many parents");
  std::vector<std::size_t> counts(std::size_t{2} << parents.size(), 0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    std::size_t j = 0;
    for (std::size_t b = 0; b < parents.size(); ++b) j |= std::size_t{data(r, parents[b])} << b;
    ++counts[2 * j + data(r, node)];
  }
  return k2_from_counts(counts, lf);
}

double k2_log_score(const DagStructure& dag, const BinaryMatrix& data) {
  if (data.cols() != dag.size()) {
    throw ShapeError("data has " + std::to_string(data.cols()) + " columns but the DAG has " +
                     std::to_string(dag.size()) + " nodes");
  }
  require_binary(data);
  const LogFactorialTable lf(data.rows() + 1);
  double s = 0.0;
  for (std::size_t v = 0; v < dag.size(); ++v) s += k2_local_score(data, v, dag.parents(v), lf);
  return s;
}

DagStructure learn_structure(const BinaryMatrix& data, const std::vector<std::string>& node_names) {
  const auto n = node_names.size();
  if (data.cols() != n) {
    throw ShapeError("data has " + std::to_string(data.cols()) + " columns but " + std::to_string(n) +
                     " node names were given");
  }
  if (n > kMaxExhaustiveNodes) {
    throw CapacityError("exhaustive structure search supports at most " +
                        std::to_string(kMaxExhaustiveNodes) + " attributes, got " + std::to_string(n) +
                        "; reduce the attribute count for exhaustive mode");
  }
  require_binary(data);
  const LogFactorialTable lf(data.rows() + 1);
  const auto hist = pattern_histogram(data);

  // Decomposable score: cache every (node, parent set) local term once.
  const std::size_t sets = std::size_t{1} << n;
  std::vector<double> local(n * sets, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::uint32_t m = 0; m < sets; ++m) {
      if (m & (1u << v)) continue;
      local[v * sets + m] = local_from_histogram(hist, v, m, n, lf);
    }
  }

  bool have_best = false;
  double best = 0.0;
  std::vector<std::uint32_t> best_masks(n, 0);
  std::size_t best_edges = 0;
  std::vector<Edge> best_edge_list;

  auto edge_list = [n](std::span<const std::uint32_t> masks) {
    std::vector<Edge> out;
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t p = 0; p < n; ++p) {
        if (masks[c] & (1u << p)) out.emplace_back(p, c);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  for_each_dag(n, [&](std::span<const std::uint32_t> masks) {
    double s = 0.0;
    std::size_t edges = 0;
    for (std::size_t v = 0; v < n; ++v) {
      s += local[v * sets + masks[v]];
      edges += static_cast<std::size_t>(std::popcount(masks[v]));
    }
    bool take = false;
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    if (!have_best || s > best + tol) {
      take = true;
    } else if (s >= best - tol) {
      if (edges < best_edges) {
        take = true;
      } else if (edges == best_edges) {
        take = lexicographically_smaller(edge_list(masks), best_edge_list);
      }
    }
    if (take) {
      // Keep the exact maximum as the reference so ties do not drift.
      best = have_best ? std::max(best, s) : s;
      have_best = true;
      best_masks.assign(masks.begin(), masks.end());
      best_edges = edges;
      best_edge_list = edge_list(masks);
    }
  });
  return DagStructure::from_parent_masks(node_names, best_masks);
}

}  // namespace bnmr::bayes
