#include "doctest.h"

#include <cmath>
#include <random>

#include "bnmr/bayesnet.hpp"
#include "bnmr/errors.hpp"
#include "bnmr/inference.hpp"
#include "oracles.hpp"

using namespace bnmr;
using namespace bnmr::bayes;

namespace {

BinaryMatrix column(std::initializer_list<int> values) {
  BinaryMatrix m(values.size(), 1);
  std::size_t r = 0;
  for (int v : values) m(r++, 0) = static_cast<std::uint8_t>(v);
  return m;
}

BayesianNetwork three_node() {
  const DagStructure d({"a", "b", "c"}, {{}, {0}, {0, 1}});
  return BayesianNetwork(d, {Cpt{0, {}, {0.3}}, Cpt{1, {0}, {0.2, 0.9}}, Cpt{2, {0, 1}, {0.1, 0.4, 0.5, 0.8}}});
}

std::vector<PredictionObservation> observations(std::vector<std::uint8_t> a, std::size_t count, std::size_t positives) {
  std::vector<PredictionObservation> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({a, static_cast<std::uint8_t>(i < positives ? 1 : 0)});
  return out;
}

}  // namespace

TEST_CASE("fit_cpts on a root node") {
  const auto d = DagStructure::empty({"x"});
  CHECK(fit_cpts(d, column({1, 1, 1, 0}), 0.0).cpt(0).table[0] == doctest::Approx(0.75));
  CHECK(fit_cpts(d, column({1, 1, 1, 0}), 1.0).cpt(0).table[0] == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("fit_cpts with unobserved parent configurations") {
  BinaryMatrix m(3, 2);
  for (std::size_t r = 0; r < 3; ++r) {
    m(r, 0) = 0;
    m(r, 1) = r == 0;
  }
  const DagStructure d({"p", "c"}, {{}, {0}});
  const auto smoothed = fit_cpts(d, m, 1.0);
  CHECK(smoothed.cpt(1).table[1] == 0.5);
  CHECK(smoothed.cpt(1).table[0] == doctest::Approx(2.0 / 5.0));

  std::vector<std::string> warnings;
  const auto mle = fit_cpts(d, m, 0.0, &warnings);
  CHECK(mle.cpt(1).table[1] == 0.5);
  CHECK(mle.cpt(1).table[0] == doctest::Approx(1.0 / 3.0));
  CHECK(warnings.size() == 1);
  CHECK_THROWS_AS(fit_cpts(d, m, -1.0), ConfigError);
}

TEST_CASE("joint distribution is normalized") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto bn = oracle::random_network(1 + t % 6, rng);
    double total = 0.0;
    std::vector<std::uint8_t> a(bn.size());
    for (std::uint32_t bits = 0; bits < (1u << bn.size()); ++bits) {
      for (std::size_t v = 0; v < bn.size(); ++v) a[v] = bits >> v & 1u;
      total += bn.joint_probability(a);
      CHECK(bn.joint_probability(a) == doctest::Approx(oracle::joint(bn, bits)).epsilon(1e-14));
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("network validation") {
  const DagStructure d({"a", "b"}, {{}, {0}});
  CHECK_THROWS_AS(BayesianNetwork(d, {Cpt{0, {}, {0.5}}}), ConfigError);
  CHECK_THROWS_AS(BayesianNetwork(d, {Cpt{0, {}, {0.5}}, Cpt{1, {0}, {0.5}}}), ConfigError);
  CHECK_THROWS_AS(BayesianNetwork(d, {Cpt{0, {}, {1.5}}, Cpt{1, {0}, {0.5, 0.5}}}), ConfigError);
  CHECK_THROWS_AS(BayesianNetwork(d, {Cpt{0, {}, {0.5}}, Cpt{1, {0}, {0.5, 0.5}}}, 7), ConfigError);
}

TEST_CASE("append_prediction_node") {
  const auto bn = append_prediction_node(three_node());
  REQUIRE(bn.prediction_node());
  const auto yhat = *bn.prediction_node();
  CHECK(bn.structure().name(yhat) == "Yhat");
  CHECK(bn.cpt(yhat).table == std::vector<double>(8, 0.5));
  CHECK(bn.structure().parents(yhat) == std::vector<std::size_t>{0, 1, 2});
  CHECK(variable_elimination(bn, {yhat, 1}) == 0.5);
  for (const auto& name : {"a", "b", "c"}) {
    CHECK(calibrator_z(bn, name, 1) == 1.0);
    CHECK(calibrator_z(bn, name, 0) == 1.0);
  }
  CHECK_THROWS_AS(append_prediction_node(bn), StateError);

  const auto wide = oracle::sample_coins(4, 11, 0);
  std::vector<std::string> names;
  for (int i = 0; i < 11; ++i) names.push_back("n" + std::to_string(i));
  CHECK_THROWS_AS(append_prediction_node(fit_cpts(DagStructure::empty(names), wide)), CapacityError);
}

TEST_CASE("online update blends counts into the prediction CPT only") {
  const DagStructure d({"a"}, {{}});
  const auto base = append_prediction_node(BayesianNetwork(d, {Cpt{0, {}, {0.4}}}));
  const auto yhat = *base.prediction_node();

  const auto buf = observations({1}, 80, 80);
  const auto upd = online_update(base, buf, 80.0);
  CHECK(upd.cpt(yhat).table[1] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(upd.cpt(yhat).table[0] == 0.5);  // no observations for a=0
  CHECK(upd.cpt(0) == base.cpt(0));

  const auto mle = online_update(base, observations({0}, 10, 7), 1e-9);
  CHECK(mle.cpt(yhat).table[0] == doctest::Approx(0.7).epsilon(1e-6));

  CHECK(online_update(base, std::vector<PredictionObservation>{}, 80.0) == base);
  CHECK_THROWS_AS(online_update(base, observations({1, 0}, 1, 1), 80.0), ShapeError);
  CHECK_THROWS_AS(online_update(base, buf, 0.0), ConfigError);
  CHECK_THROWS_AS(online_update(BayesianNetwork(d, {Cpt{0, {}, {0.4}}}), buf, 80.0), StateError);
}

TEST_CASE("repeated online updates stay in [0,1] and leave attributes untouched") {
  std::mt19937_64 rng(8);
  auto bn = append_prediction_node(oracle::random_network(4, rng));
  const auto before = bn;
  std::bernoulli_distribution coin(0.5);
  for (int round = 0; round < 50; ++round) {
    std::vector<PredictionObservation> buf;
    for (int i = 0; i < 30; ++i) {
      PredictionObservation o;
      for (int k = 0; k < 4; ++k) o.attributes.push_back(coin(rng));
      o.prediction = coin(rng);
      buf.push_back(o);
    }
    bn = online_update(bn, buf, 5.0 + round);
    for (double p : bn.cpt(*bn.prediction_node()).table) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
  for (std::size_t v = 0; v < 4; ++v) CHECK(bn.cpt(v) == before.cpt(v));
}
