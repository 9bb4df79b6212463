#include "bnmr/bayesnet.hpp"

#include <algorithm>
#include <cmath>

#include "bnmr/errors.hpp"
#include "bnmr/structure.hpp"

namespace bnmr::bayes {

std::size_t Cpt::config_index(std::span<const std::uint8_t> assignment) const {
  std::size_t j = 0;
  for (std::size_t b = 0; b < parent_order.size(); ++b) {
    j |= std::size_t{assignment[parent_order[b]] != 0} << b;
  }
  return j;
}

double Cpt::probability(std::span<const std::uint8_t> assignment) const {
  const double p1 = table[config_index(assignment)];
  return assignment[node] ? p1 : 1.0 - p1;
}

BayesianNetwork::BayesianNetwork(DagStructure structure, std::vector<Cpt> cpts,
                                 std::optional<std::size_t> prediction_node)
    : structure_(std::move(structure)), cpts_(std::move(cpts)), prediction_(prediction_node) {
  if (cpts_.size() != structure_.size()) {
    throw ConfigError("network has " + std::to_string(structure_.size()) + " nodes but " +
                      std::to_string(cpts_.size()) + " CPTs");
  }
  for (std::size_t v = 0; v < cpts_.size(); ++v) {
    const auto& c = cpts_[v];
    const auto& name = structure_.name(v);
    if (c.node != v) throw ConfigError("CPT " + std::to_string(v) + " is labelled for another node");
    if (c.parent_order != structure_.parents(v)) {
      throw ConfigError("CPT of '" + name + "' disagrees with the structure's parent list");
    }
    const std::size_t expect = std::size_t{1} << c.parent_order.size();
    if (c.table.size() != expect) {
      throw ConfigError("CPT of '" + name + "' has " + std::to_string(c.table.size()) +
                        " entries, expected " + std::to_string(expect));
    }
    for (double p : c.table) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("CPT of '" + name + "' has an entry outside [0, 1]");
      }
    }
  }
  if (prediction_ && *prediction_ >= structure_.size()) {
    throw ConfigError("prediction node index out of range");
  }
}

double BayesianNetwork::joint_probability(std::span<const std::uint8_t> assignment) const {
  if (assignment.size() != size()) throw ShapeError("joint assignment has the wrong width");
  double p = 1.0;
  for (const auto& c : cpts_) p *= c.probability(assignment);
  return p;
}

BayesianNetwork fit_cpts(const DagStructure& dag, const BinaryMatrix& data, double pseudocount,
                         std::vector<std::string>* warnings) {
  if (data.cols() != dag.size()) {
    throw ShapeError("data has " + std::to_string(data.cols()) + " columns but the DAG has " +
                     std::to_string(dag.size()) + " nodes");
  }
  if (!(pseudocount >= 0.0)) throw ConfigError("pseudocount must be non-negative");
  require_binary(data);
  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < dag.size(); ++v) {
    Cpt c{v, dag.parents(v), {}};
    const std::size_t configs = std::size_t{1} << c.parent_order.size();
    std::vector<double> ones(configs, 0.0), totals(configs, 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
      const auto j = c.config_index(data.row(r));
      totals[j] += 1.0;
      ones[j] += data(r, v);
    }
    c.table.resize(configs);
    for (std::size_t j = 0; j < configs; ++j) {
      const double denom = totals[j] + 2.0 * pseudocount;
      if (denom == 0.0) {
        c.table[j] = 0.5;
        if (warnings) {
          warnings->push_back("node '" + dag.name(v) + "': parent configuration " + std::to_string(j) +
                              " never observed; entry set to 0.5");
        }
      } else {
        c.table[j] = (ones[j] + pseudocount) / denom;
      }
    }
    cpts.push_back(std::move(c));
  }
  return BayesianNetwork(dag, std::move(cpts));
}

BayesianNetwork append_prediction_node(const BayesianNetwork& bn, const std::string& name) {
  if (bn.prediction_node()) throw StateError("network already has a prediction node");
  const std::size_t k = bn.size();
  if (k > kMaxPredictionParents) {
    throw CapacityError("prediction node supports at most " + std::to_string(kMaxPredictionParents) +
                        " attribute parents, network has " + std::to_string(k));
  }
  auto names = bn.structure().node_names();
  auto parents = bn.structure().parent_sets();
  names.push_back(name);
  std::vector<std::size_t> all(k);
  for (std::size_t i = 0; i < k; ++i) all[i] = i;
  parents.push_back(all);
  auto cpts = bn.cpts();
  cpts.push_back(Cpt{k, all, std::vector<double>(std::size_t{1} << k, 0.5)});
  return BayesianNetwork(DagStructure(std::move(names), std::move(parents)), std::move(cpts), k);
}

BayesianNetwork online_update(const BayesianNetwork& bn, std::span<const PredictionObservation> buffer,
                              double prior_strength) {
  if (!bn.prediction_node()) throw StateError("online update needs a network with a prediction node");
  if (!(prior_strength > 0.0) || !std::isfinite(prior_strength)) {
    throw ConfigError("prior strength must be a positive finite number");
  }
  const auto yhat = *bn.prediction_node();
  const auto& old = bn.cpt(yhat);
  const std::size_t width = old.parent_order.size();
  const std::size_t configs = old.table.size();
  std::vector<double> ones(configs, 0.0), totals(configs, 0.0);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const auto& obs = buffer[i];
    if (obs.attributes.size() != width) {
      throw ShapeError("buffer entry " + std::to_string(i) + " has " + std::to_string(obs.attributes.size()) +
                       " attributes, prediction node has " + std::to_string(width) + " parents");
    }
    std::size_t j = 0;
    for (std::size_t b = 0; b < width; ++b) j |= std::size_t{obs.attributes[b] != 0} << b;
    totals[j] += 1.0;
    ones[j] += obs.prediction ? 1.0 : 0.0;
  }
  auto cpts = bn.cpts();
  auto& table = cpts[yhat].table;
  for (std::size_t j = 0; j < configs; ++j) {
    if (totals[j] == 0.0) continue;
    const double v = (prior_strength * table[j] + ones[j]) / (prior_strength + totals[j]);
    table[j] = std::min(1.0, std::max(0.0, v));
  }
  return BayesianNetwork(bn.structure(), std::move(cpts), yhat);
}

}  // namespace bnmr::bayes
