#pragma once

#include <filesystem>
#include <string>

#include "bnmr/bayesnet.hpp"

namespace bnmr::bayes {

// Line-oriented text format:
//   nodes: A B C Yhat
//   parents <node>: <parent> ...
//   cpt <node>: v0 v1 ... v{2^k-1}
//   prediction: Yhat            (only when a prediction node exists)
// CPT entry j encodes the parent assignment with the first listed parent as
// the least-significant bit. Numbers use the shortest round-trip form.

std::string to_text(const BayesianNetwork& bn);
BayesianNetwork network_from_text(const std::string& text, const std::string& source = "<string>");

void save_network(const BayesianNetwork& bn, const std::filesystem::path& path);
BayesianNetwork load_network(const std::filesystem::path& path);

}  // namespace bnmr::bayes
