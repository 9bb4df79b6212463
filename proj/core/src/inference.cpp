#include "bnmr/inference.hpp"

#include <algorithm>
#include <set>

#include "bnmr/errors.hpp"

namespace bnmr::bayes {

namespace {

// Table over binary variables; bit i of the index is the value of vars[i].
// vars is kept sorted ascending.
struct Factor {
  std::vector<std::size_t> vars;
  std::vector<double> table;

  std::size_t position(std::size_t var) const {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), var) - vars.begin());
  }
  bool contains(std::size_t var) const { return std::binary_search(vars.begin(), vars.end(), var); }
};

Factor cpt_factor(const Cpt& cpt) {
  Factor f;
  f.vars = cpt.parent_order;
  f.vars.push_back(cpt.node);
  std::sort(f.vars.begin(), f.vars.end());
  f.table.resize(std::size_t{1} << f.vars.size());
  const std::size_t node_bit = f.position(cpt.node);
  std::vector<std::size_t> parent_bits;
  for (auto p : cpt.parent_order) parent_bits.push_back(f.position(p));
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    std::size_t j = 0;
    for (std::size_t b = 0; b < parent_bits.size(); ++b) j |= ((idx >> parent_bits[b]) & 1u) << b;
    const double p1 = cpt.table[j];
    f.table[idx] = ((idx >> node_bit) & 1u) ? p1 : 1.0 - p1;
  }
  return f;
}

Factor reduce(const Factor& f, std::size_t var, std::uint8_t value) {
  if (!f.contains(var)) return f;
  const std::size_t bit = f.position(var);
  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(bit));
  out.table.resize(std::size_t{1} << out.vars.size());
  const std::size_t low = (std::size_t{1} << bit) - 1;
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    const std::size_t full = (idx & low) | (std::size_t{value} << bit) | ((idx & ~low) << 1);
    out.table[idx] = f.table[full];
  }
  return out;
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(out.vars));
  out.table.resize(std::size_t{1} << out.vars.size());
  std::vector<std::size_t> apos, bpos;
  for (auto v : a.vars) apos.push_back(out.position(v));
  for (auto v : b.vars) bpos.push_back(out.position(v));
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < apos.size(); ++i) ia |= ((idx >> apos[i]) & 1u) << i;
    for (std::size_t i = 0; i < bpos.size(); ++i) ib |= ((idx >> bpos[i]) & 1u) << i;
    out.table[idx] = a.table[ia] * b.table[ib];
  }
  return out;
}

Factor sum_out(const Factor& f, std::size_t var) {
  const std::size_t bit = f.position(var);
  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(bit));
  out.table.assign(std::size_t{1} << out.vars.size(), 0.0);
  const std::size_t low = (std::size_t{1} << bit) - 1;
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    const std::size_t base = (idx & low) | ((idx & ~low) << 1);
    out.table[idx] = f.table[base] + f.table[base | (std::size_t{1} << bit)];
  }
  return out;
}

void validate_query(const BayesianNetwork& bn, Observation query, std::span<const Observation> evidence) {
  if (query.node >= bn.size()) throw ConfigError("query node index out of range");
  if (query.value > 1) throw ConfigError("query value must be 0 or 1");
  std::set<std::size_t> seen;
  for (const auto& e : evidence) {
    if (e.node >= bn.size()) throw ConfigError("evidence node index out of range");
    if (e.value > 1) throw ConfigError("evidence value must be 0 or 1");
    if (e.node == query.node) {
      throw ConfigError("query node '" + bn.structure().name(e.node) + "' also appears in the evidence");
    }
    if (!seen.insert(e.node).second) {
      throw ConfigError("evidence lists node '" + bn.structure().name(e.node) + "' more than once");
    }
  }
}

bool is_constant(const Factor& f) {
  return std::all_of(f.table.begin(), f.table.end(), [&](double v) { return v == f.table.front(); });
}

// CPT factors reduced by the evidence. Factors that are constant after
// reduction only rescale the unnormalized result, so they are dropped; a
// constant zero means the evidence is impossible.
std::vector<Factor> initial_factors(const BayesianNetwork& bn, Observation query,
                                    std::span<const Observation> evidence) {
  std::vector<Factor> factors;
  for (const auto& c : bn.cpts()) {
    Factor f = cpt_factor(c);
    for (const auto& e : evidence) f = reduce(f, e.node, e.value);
    if (is_constant(f)) {
      if (f.table.front() == 0.0) {
        throw UndefinedConditionalError("evidence has probability zero; P(" + bn.structure().name(query.node) +
                                        " | evidence) is undefined");
      }
      continue;
    }
    factors.push_back(std::move(f));
  }
  return factors;
}

std::vector<std::size_t> to_eliminate(const BayesianNetwork& bn, Observation query,
                                      std::span<const Observation> evidence) {
  std::vector<bool> fixed(bn.size(), false);
  fixed[query.node] = true;
  for (const auto& e : evidence) fixed[e.node] = true;
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < bn.size(); ++v) {
    if (!fixed[v]) out.push_back(v);
  }
  return out;
}

std::size_t pick_min_degree(const std::vector<Factor>& factors, const std::vector<std::size_t>& pending) {
  std::size_t best = pending.front();
  std::size_t best_degree = static_cast<std::size_t>(-1);
  for (auto v : pending) {  // pending is ascending, so '<' keeps the lowest index on ties
    std::set<std::size_t> nbrs;
    for (const auto& f : factors) {
      if (!f.contains(v)) continue;
      for (auto u : f.vars) {
        if (u != v) nbrs.insert(u);
      }
    }
    if (nbrs.size() < best_degree) {
      best_degree = nbrs.size();
      best = v;
    }
  }
  return best;
}

// Runs elimination; returns the order used and leaves the product of the
// remaining factors in `result`.
std::vector<std::size_t> eliminate(std::vector<Factor> factors, std::vector<std::size_t> pending,
                                   Factor* result) {
  std::vector<std::size_t> order;
  while (!pending.empty()) {
    const auto v = pick_min_degree(factors, pending);
    pending.erase(std::find(pending.begin(), pending.end(), v));
    order.push_back(v);
    const bool used = std::any_of(factors.begin(), factors.end(), [v](const Factor& f) { return f.contains(v); });
    if (!used) continue;  // summing out a free variable only rescales
    Factor prod{{}, {1.0}};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.contains(v)) {
        prod = multiply(prod, f);
      } else {
        rest.push_back(std::move(f));
      }
    }
    rest.push_back(sum_out(prod, v));
    factors = std::move(rest);
  }
  if (result) {
    Factor prod{{}, {1.0}};
    for (const auto& f : factors) prod = multiply(prod, f);
    *result = std::move(prod);
  }
  return order;
}

}  // namespace

std::vector<std::size_t> elimination_order(const BayesianNetwork& bn, Observation query,
                                           std::span<const Observation> evidence) {
  validate_query(bn, query, evidence);
  return eliminate(initial_factors(bn, query, evidence), to_eliminate(bn, query, evidence), nullptr);
}

double variable_elimination(const BayesianNetwork& bn, Observation query,
                            std::span<const Observation> evidence) {
  validate_query(bn, query, evidence);
  Factor result;
  eliminate(initial_factors(bn, query, evidence), to_eliminate(bn, query, evidence), &result);
  // Only the query variable can remain; if every factor touching it was
  // constant, it is uniform.
  double p0 = 0.5, p1 = 0.5;
  if (!result.vars.empty()) {
    p0 = result.table[0];
    p1 = result.table[1];
  }
  const double z = p0 + p1;
  if (!(z > 0.0)) {
    throw UndefinedConditionalError("evidence has probability zero; P(" + bn.structure().name(query.node) +
                                    " | evidence) is undefined");
  }
  return (query.value ? p1 : p0) / z;
}

double calibrator_z(const BayesianNetwork& bn, const std::string& attribute, std::uint8_t value) {
  if (!bn.prediction_node()) throw StateError("calibrator needs a network with a prediction node");
  const auto a = bn.index_of(attribute);
  const auto yhat = *bn.prediction_node();
  if (a == yhat) throw ConfigError("calibrator attribute must not be the prediction node");
  const double prior = variable_elimination(bn, {a, value});
  if (prior == 0.0) {
    throw DivisionByZeroError("P(" + attribute + "=" + std::to_string(int(value)) +
                              ") is zero; calibrator undefined");
  }
  const Observation ev[] = {{yhat, 1}};
  const double posterior = variable_elimination(bn, {a, value}, ev);
  return posterior / prior;
}

std::vector<CalibrationPair> calibration_pairs(const BayesianNetwork& bn,
                                               const std::vector<std::string>& attributes) {
  std::vector<CalibrationPair> out;
  out.reserve(attributes.size());
  for (const auto& name : attributes) {
    out.push_back({calibrator_z(bn, name, 1), calibrator_z(bn, name, 0)});
  }
  return out;
}

}  // namespace bnmr::bayes
