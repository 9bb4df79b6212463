#pragma once

#include <cstdint>

#include "bnmr/dag.hpp"
#include "bnmr/matrix.hpp"

namespace bnmr::bayes {

struct ContingencyTable {
  // counts[u][v]
  std::uint64_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  std::uint64_t total() const { return n00 + n01 + n10 + n11; }
};

struct ChiSquareResult {
  double chi2 = 0.0;
  double p_value = 1.0;
  double phi = 0.0;
  /// A row or column marginal was zero; the statistic is reported as 0.
  bool degenerate = false;
};

ContingencyTable contingency(const BinaryMatrix& data, std::size_t u, std::size_t v);

/// Pearson chi-square on a 2x2 table, no continuity correction; p-value
/// from the 1-dof chi-square distribution; phi = sqrt(chi2 / n).
ChiSquareResult chi2_independence(const ContingencyTable& table);
ChiSquareResult chi2_independence(const BinaryMatrix& data, std::size_t u, std::size_t v);

/// Upper tail of the chi-square distribution with one degree of freedom.
double chi2_survival_1dof(double x);

/// Drops every edge whose endpoints are not significantly dependent
/// (p >= alpha) under the marginal pairwise test.
DagStructure prune_edges(const DagStructure& dag, const BinaryMatrix& data, double alpha = 0.05);

}  // namespace bnmr::bayes
