#include "doctest.h"

#include <cmath>
#include <random>

#include "bnmr/bayesnet.hpp"
#include "bnmr/errors.hpp"
#include "bnmr/inference.hpp"
#include "oracles.hpp"

using namespace bnmr;
using namespace bnmr::bayes;

TEST_CASE("root marginal and two-node chain") {
  const DagStructure d({"A", "B"}, {{}, {0}});
  const BayesianNetwork bn(d, {Cpt{0, {}, {0.3}}, Cpt{1, {0}, {0.2, 0.9}}});
  CHECK(variable_elimination(bn, {0, 1}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(variable_elimination(bn, {1, 1}) == doctest::Approx(0.41).epsilon(1e-15));
  CHECK(variable_elimination(bn, {1, 0}) == doctest::Approx(0.59).epsilon(1e-15));
  const std::vector<Observation> ev{{1, 1}};
  CHECK(variable_elimination(bn, {0, 1}, ev) == doctest::Approx(0.27 / 0.41).epsilon(1e-12));
}

TEST_CASE("variable elimination matches brute-force enumeration") {
  std::mt19937_64 rng(20240611);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 6;
    const auto bn = oracle::random_network(n, rng, 0.6);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const auto q = pick(rng);
    std::vector<Observation> ev;
    std::vector<std::pair<std::size_t, int>> ev_pairs;
    for (std::size_t v = 0; v < n; ++v) {
      if (v != q && rng() % 3 == 0) {
        const auto val = static_cast<std::uint8_t>(rng() % 2);
        ev.push_back({v, val});
        ev_pairs.emplace_back(v, val);
      }
    }
    for (std::uint8_t qv : {0, 1}) {
      const double expect = oracle::brute_force_conditional(bn, q, qv, ev_pairs);
      CHECK(std::abs(variable_elimination(bn, {q, qv}, ev) - expect) <= 1e-9);
    }
  }
}

TEST_CASE("zero-probability evidence is rejected") {
  const DagStructure d({"A", "B"}, {{}, {0}});
  const BayesianNetwork bn(d, {Cpt{0, {}, {0.0}}, Cpt{1, {0}, {0.2, 0.9}}});
  const std::vector<Observation> ev{{0, 1}};
  CHECK_THROWS_AS(variable_elimination(bn, {1, 1}, ev), UndefinedConditionalError);
  const std::vector<Observation> dup{{0, 1}, {0, 1}};
  CHECK_THROWS_AS(variable_elimination(bn, {1, 1}, dup), ConfigError);
  const std::vector<Observation> self{{1, 1}};
  CHECK_THROWS_AS(variable_elimination(bn, {1, 1}, self), ConfigError);
}

TEST_CASE("elimination order is min-degree with index tie-break") {
  // Star: hub 0 with leaves 1..3. Leaves have degree 1 and go first, by index.
  const DagStructure d({"h", "l1", "l2", "l3"}, {{}, {0}, {0}, {0}});
  const BayesianNetwork bn(d, {Cpt{0, {}, {0.5}}, Cpt{1, {0}, {0.1, 0.2}}, Cpt{2, {0}, {0.3, 0.4}},
                               Cpt{3, {0}, {0.5, 0.6}}});
  CHECK(elimination_order(bn, {0, 1}) == std::vector<std::size_t>{1, 2, 3});
  CHECK(elimination_order(bn, {3, 1}) == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("calibrator on the single-attribute fixture") {
  const DagStructure d({"A", "Yhat"}, {{}, {0}});
  const BayesianNetwork bn(d, {Cpt{0, {}, {0.5}}, Cpt{1, {0}, {0.4, 0.8}}}, 1);
  CHECK(variable_elimination(bn, {1, 1}) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(std::abs(calibrator_z(bn, "A", 1) - 4.0 / 3.0) <= 1e-9);
  CHECK(std::abs(calibrator_z(bn, "A", 0) - 2.0 / 3.0) <= 1e-9);
  const auto pairs = calibration_pairs(bn, {"A"});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].z_pos == calibrator_z(bn, "A", 1));
  CHECK(pairs[0].z_neg == calibrator_z(bn, "A", 0));
}

TEST_CASE("calibrator errors") {
  const DagStructure d({"A", "Yhat"}, {{}, {0}});
  const BayesianNetwork never_one(d, {Cpt{0, {}, {0.0}}, Cpt{1, {0}, {0.4, 0.8}}}, 1);
  CHECK_THROWS_AS(calibrator_z(never_one, "A", 1), DivisionByZeroError);
  const BayesianNetwork never_positive(d, {Cpt{0, {}, {0.5}}, Cpt{1, {0}, {0.0, 0.0}}}, 1);
  CHECK_THROWS_AS(calibrator_z(never_positive, "A", 1), UndefinedConditionalError);
  const BayesianNetwork no_pred(d, {Cpt{0, {}, {0.5}}, Cpt{1, {0}, {0.4, 0.8}}});
  CHECK_THROWS_AS(calibrator_z(no_pred, "A", 1), StateError);
  CHECK_THROWS_AS(calibrator_z(never_one, "missing", 1), ConfigError);
}

TEST_CASE("uniform prediction node gives Z = 1 on random networks") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 6;
    const auto bn = append_prediction_node(oracle::random_network(n, rng));
    for (std::size_t v = 0; v < n; ++v) {
      CHECK(calibrator_z(bn, bn.structure().name(v), 1) == 1.0);
      CHECK(calibrator_z(bn, bn.structure().name(v), 0) == 1.0);
    }
  }
}
