#pragma once

#include <string>
#include <vector>

#include "bnmr/dag.hpp"
#include "bnmr/matrix.hpp"

namespace bnmr::bayes {

/// Throws DataError unless every entry is 0 or 1.
void require_binary(const BinaryMatrix& data, const std::string& what = "data");

/// log(k!) for k = 0..max, by cumulative sums of log(i).
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::size_t max);
  double operator()(std::size_t k) const { return table_.at(k); }

 private:
  std::vector<double> table_;
};

/// Cooper-Herskovits (K2) local score of one node given an ordered parent
/// list, with r = 2 states:
///   sum_j [ log((r-1)!) - log((N_j + r - 1)!) + sum_k log(N_jk!) ].
double k2_local_score(const BinaryMatrix& data, std::size_t node,
                      const std::vector<std::size_t>& parents, const LogFactorialTable& lf);

/// Sum of local K2 scores over all nodes. Columns of `data` align with DAG nodes.
double k2_log_score(const DagStructure& dag, const BinaryMatrix& data);

/// Exhaustive search for the K2-optimal DAG (at most 6 nodes). Ties go to
/// the DAG with fewer edges, then to the lexicographically smaller sorted
/// edge list.
DagStructure learn_structure(const BinaryMatrix& data, const std::vector<std::string>& node_names);

}  // namespace bnmr::bayes
