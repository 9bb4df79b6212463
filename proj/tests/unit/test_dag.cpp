#include "doctest.h"

#include <set>

#include "bnmr/dag.hpp"
#include "bnmr/errors.hpp"
#include "oracles.hpp"

using namespace bnmr;
using namespace bnmr::bayes;

TEST_CASE("DAG counts match brute force over directed edge subsets") {
  CHECK(enumerate_dags(1).size() == 1);
  for (std::size_t n = 1; n <= 4; ++n) {
    CHECK(for_each_dag(n, [](std::span<const std::uint32_t>) {}) == oracle::count_dags_brute_force(n));
  }
  CHECK(oracle::count_dags_brute_force(2) == 3);
  CHECK(oracle::count_dags_brute_force(3) == 25);
}

TEST_CASE("DAG counts for five and six nodes") {
  // Robinson's counts of labeled DAGs.
  CHECK(for_each_dag(5, [](std::span<const std::uint32_t>) {}) == 29281);
  CHECK(for_each_dag(6, [](std::span<const std::uint32_t>) {}) == 3781503);
}

TEST_CASE("enumerated DAGs are distinct and acyclic") {
  const auto dags = enumerate_dags(3, {"a", "b", "c"});
  std::set<std::vector<Edge>> seen;
  for (const auto& d : dags) {
    CHECK(d.topological_order().size() == 3);
    seen.insert(d.edges());
  }
  CHECK(seen.size() == 25);
  CHECK(dags.front().node_names() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("enumeration is capped") {
  CHECK_THROWS_AS(enumerate_dags(7), CapacityError);
  CHECK_THROWS_AS(for_each_dag(7, [](std::span<const std::uint32_t>) {}), CapacityError);
  CHECK_THROWS_AS(enumerate_dags(0), ConfigError);
}

TEST_CASE("DagStructure validation") {
  CHECK_NOTHROW(DagStructure({"a", "b"}, {{}, {0}}));
  CHECK_THROWS_AS(DagStructure({"a", "b"}, {{1}, {0}}), ConfigError);
  CHECK_THROWS_AS(DagStructure({"a", "b"}, {{0}, {}}), ConfigError);
  CHECK_THROWS_AS(DagStructure({"a", "b"}, {{}, {0, 0}}), ConfigError);
  CHECK_THROWS_AS(DagStructure({"a", "b"}, {{}, {5}}), ConfigError);
  CHECK_THROWS_AS(DagStructure({"a", "a"}, {{}, {}}), ConfigError);
  CHECK_THROWS_AS(DagStructure({"a b", "c"}, {{}, {}}), ConfigError);
  CHECK_THROWS_AS(DagStructure({"a", "b"}, {{}}), ConfigError);
}

TEST_CASE("DagStructure queries") {
  const DagStructure d({"a", "b", "c"}, {{}, {0}, {1, 0}});
  CHECK(d.edge_count() == 3);
  CHECK(d.has_edge(0, 1));
  CHECK_FALSE(d.has_edge(1, 0));
  CHECK(d.index_of("c") == 2);
  CHECK_THROWS_AS(d.index_of("z"), ConfigError);
  CHECK(d.skeleton() == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(d.topological_order() == std::vector<std::size_t>{0, 1, 2});
  const auto pruned = d.without_edge(0, 2);
  CHECK(pruned.edge_count() == 2);
  CHECK_FALSE(pruned.has_edge(0, 2));
}
