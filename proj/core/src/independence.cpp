#include "bnmr/independence.hpp"

#include <algorithm>
#include <cmath>

#include "bnmr/errors.hpp"
#include "bnmr/structure.hpp"

namespace bnmr::bayes {

ContingencyTable contingency(const BinaryMatrix& data, std::size_t u, std::size_t v) {
  if (u >= data.cols() || v >= data.cols()) throw ShapeError("contingency column index out of range");
  ContingencyTable t;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto a = data(r, u), b = data(r, v);
    if (a > 1 || b > 1) {
      throw DataError("non-binary value in contingency columns at row " + std::to_string(r));
    }
    if (a == 0) {
      (b == 0 ? t.n00 : t.n01)++;
    } else {
      (b == 0 ? t.n10 : t.n11)++;
    }
  }
  return t;
}

double chi2_survival_1dof(double x) {
  if (!(x > 0.0)) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

ChiSquareResult chi2_independence(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total());
  if (n < 1) throw DataError("chi-square test needs at least one observation");
  const double obs[2][2] = {{double(t.n00), double(t.n01)}, {double(t.n10), double(t.n11)}};
  const double row[2] = {obs[0][0] + obs[0][1], obs[1][0] + obs[1][1]};
  const double col[2] = {obs[0][0] + obs[1][0], obs[0][1] + obs[1][1]};
  ChiSquareResult out;
  if (row[0] == 0 || row[1] == 0 || col[0] == 0 || col[1] == 0) {
    out.degenerate = true;
    return out;
  }
  double chi2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double e = row[i] * col[j] / n;
      const double d = obs[i][j] - e;
      chi2 += d * d / e;
    }
  }
  out.chi2 = chi2;
  out.p_value = chi2_survival_1dof(chi2);
  // phi <= 1 mathematically; rounding can overshoot by an ulp.
  out.phi = std::min(1.0, std::sqrt(chi2 / n));
  return out;
}

ChiSquareResult chi2_independence(const BinaryMatrix& data, std::size_t u, std::size_t v) {
  return chi2_independence(contingency(data, u, v));
}

DagStructure prune_edges(const DagStructure& dag, const BinaryMatrix& data, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("pruning significance level must lie in (0, 1)");
  if (data.cols() != dag.size()) {
    throw ShapeError("data has " + std::to_string(data.cols()) + " columns but the DAG has " +
                     std::to_string(dag.size()) + " nodes");
  }
  auto parents = dag.parent_sets();
  for (std::size_t c = 0; c < parents.size(); ++c) {
    std::vector<std::size_t> kept;
    for (auto p : parents[c]) {
      if (chi2_independence(data, p, c).p_value < alpha) kept.push_back(p);
    }
    parents[c] = std::move(kept);
  }
  return DagStructure(dag.node_names(), std::move(parents));
}

}  // namespace bnmr::bayes
