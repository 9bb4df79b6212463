#include "doctest.h"

#include <cmath>
#include <set>

#include "bnmr/errors.hpp"
#include "bnmr/fairmetrics.hpp"
#include "bnmr/synthetic.hpp"
#include "oracles.hpp"

using namespace bnmr;
using namespace bnmr::data;

namespace {

std::string fixture_path(const std::string& name) { return std::string(BNMR_SOURCE_DIR) + "/tests/fixtures/" + name; }

const char* kChainSpec = R"(attributes.names = A, B, C
attributes.parents.B = A
attributes.parents.C = B
attributes.cpt.A = 0.5
attributes.cpt.B = 0.1, 0.9
attributes.cpt.C = 0.2, 0.7
target.name = y
label.intercept = -0.5
label.coefficients = 1, 0, 0
label.noise = 0
features.dim = 2
features.sigma = 0.5
features.label_shift = 1, 0
features.shift.A = 0, 1
features.shift.B = 0, 0
features.shift.C = 1, 1
)";

SyntheticSpec chain_spec(const std::string& extra = "") {
  return synthetic_spec_from_config(KvConfig::parse(std::string(kChainSpec) + extra));
}

// Chain spec with the line for `key` replaced.
SyntheticSpec chain_spec_with(const std::string& key, const std::string& value) {
  std::string text = kChainSpec;
  const auto at = text.find(key + " = ");
  REQUIRE(at != std::string::npos);
  const auto end = text.find('\n', at);
  text.replace(at, end - at, key + " = " + value);
  return synthetic_spec_from_config(KvConfig::parse(text));
}

double analytic_phi(const bayes::BayesianNetwork& bn, std::size_t u, std::size_t v) {
  double p[2][2] = {{0, 0}, {0, 0}};
  for (std::uint32_t b = 0; b < (1u << bn.size()); ++b) p[(b >> u) & 1][(b >> v) & 1] += oracle::joint(bn, b);
  const double r1 = p[1][0] + p[1][1], c1 = p[0][1] + p[1][1];
  return std::abs(p[1][1] * p[0][0] - p[1][0] * p[0][1]) / std::sqrt(r1 * (1 - r1) * c1 * (1 - c1));
}

Dataset tiny() {
  Dataset ds;
  ds.target_name = "t";
  ds.attribute_names = {"p", "q"};
  ds.ids = {"a", "b", "c"};
  ds.features = RealMatrix(3, 2, std::vector<double>{0.1, -2.5, 1e-17, 3.0, 0.3333333333333333, 7.0});
  ds.labels = {1, 0, 1};
  ds.attributes = BinaryMatrix(3, 2, std::vector<std::uint8_t>{1, 0, 0, 0, 1, 1});
  return ds;
}

}  // namespace

TEST_CASE("dataset csv round trip") {
  const auto ds = tiny();
  const auto text = dataset_to_csv(ds);
  CHECK(text.rfind("id,x0,x1,y:t,a:p,a:q\n", 0) == 0);
  CHECK(dataset_from_csv(text) == ds);

  auto gen = generate_synthetic(chain_spec(), 200, 4);
  CHECK(dataset_from_csv(dataset_to_csv(gen)) == gen);
}

TEST_CASE("dataset csv errors carry line numbers") {
  auto text = dataset_to_csv(tiny());
  auto bad = text;
  bad.replace(bad.rfind(",1,1"), 4, ",1,2");
  try {
    dataset_from_csv(bad, "f.csv");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("f.csv:4") != std::string::npos);
  }
  CHECK_THROWS_AS(dataset_from_csv("id,x0\nr,1\n"), ParseError);
  CHECK_THROWS_AS(dataset_from_csv(""), ParseError);
  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("attribute annotation fixture") {
  const auto t = read_attribute_table(fixture_path("list_attr_small.txt"));
  CHECK(t.ids == std::vector<std::string>{"000001.jpg", "000002.jpg", "000003.jpg"});
  CHECK(t.names == std::vector<std::string>{"5_o_Clock_Shadow", "Arched_Eyebrows", "Male", "Attractive"});
  CHECK(t.values == BinaryMatrix(3, 4, std::vector<std::uint8_t>{0, 1, 0, 1, 0, 0, 1, 0, 1, 1, 1, 1}));

  const auto ds = load_attribute_csv(fixture_path("list_attr_small.txt"), "Attractive", {"Arched_Eyebrows"});
  CHECK(ds.labels == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(ds.attributes.column(0) == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(ds.features == RealMatrix(3, 2, std::vector<double>{0, 0, 0, 1, 1, 1}));

  const auto only = load_attribute_csv(fixture_path("list_attr_small.txt"), "Attractive", {"Male"},
                                       std::vector<std::string>{"Arched_Eyebrows"});
  CHECK(only.features == RealMatrix(3, 1, std::vector<double>{1, 0, 1}));
}

TEST_CASE("attribute annotation errors") {
  try {
    attribute_table_from_text("4\nA B\nr1 1 -1\nr2 -1 1\n", "ann.txt");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("4") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
  try {
    attribute_table_from_text("2\nA B\nr1 1 -1\nr2 0 1\n", "ann.txt");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("ann.txt:4") != std::string::npos);
  }
  CHECK_THROWS_AS(attribute_table_from_text("1\nA B\nr1 1\n"), ParseError);
  CHECK_THROWS_AS(attribute_table_from_text("1\nA B\nr1 +1 -1\n").names.size(), ParseError);
  CHECK_THROWS_AS(load_attribute_csv(fixture_path("list_attr_small.txt"), "Attractive", {"Bald"}), ConfigError);
  CHECK_THROWS_AS(load_attribute_csv(fixture_path("list_attr_small.txt"), "Male", {"Male"}), ConfigError);
}

TEST_CASE("partition split") {
  const auto ds = load_attribute_csv(fixture_path("list_attr_four.txt"), "C", {"A"});
  const auto s = split_by_partition(ds, fixture_path("partition_small.txt"));
  CHECK(s.train.ids == std::vector<std::string>{"000001.jpg", "000003.jpg"});
  CHECK(s.val.ids == std::vector<std::string>{"000004.jpg"});
  CHECK(s.test.ids == std::vector<std::string>{"000002.jpg"});
  CHECK(s.train.labels == std::vector<std::uint8_t>{1, 0});
  CHECK_THROWS_AS(split_by_partition_text(ds, "000001.jpg 0\n000009.jpg 1\n"), ParseError);
  CHECK_THROWS_AS(split_by_partition_text(ds, "000001.jpg 3\n"), ParseError);
  CHECK_THROWS_AS(split_by_partition_text(ds, "000001.jpg 0\n"), ParseError);
}

TEST_CASE("ratio split") {
  const auto ds = generate_synthetic(chain_spec(), 100, 1);
  const auto a = split_by_ratio(ds, {0.8, 0.1, 0.1}, 9);
  CHECK(a.train.size() == 80);
  CHECK(a.val.size() == 10);
  CHECK(a.test.size() == 10);
  const auto b = split_by_ratio(ds, {0.8, 0.1, 0.1}, 9);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  std::set<std::string> seen;
  for (const auto* part : {&a.train, &a.val, &a.test}) {
    std::size_t last = 0;
    for (std::size_t i = 0; i < part->size(); ++i) {
      CHECK(seen.insert(part->ids[i]).second);
      const auto pos = static_cast<std::size_t>(std::find(ds.ids.begin(), ds.ids.end(), part->ids[i]) - ds.ids.begin());
      if (i > 0) CHECK(pos > last);
      last = pos;
    }
  }
  CHECK(seen.size() == 100);
  CHECK_FALSE(split_by_ratio(ds, {0.8, 0.1, 0.1}, 10).train == a.train);
  CHECK_THROWS_AS(split_by_ratio(ds, {0.8, 0.1, 0.2}, 9), ConfigError);
  CHECK_THROWS_AS(split_by_ratio(ds, {1.1, -0.1, 0.0}, 9), ConfigError);
}

TEST_CASE("synthetic generation is seeded") {
  const auto spec = chain_spec();
  CHECK(generate_synthetic(spec, 300, 5) == generate_synthetic(spec, 300, 5));
  CHECK_FALSE(generate_synthetic(spec, 300, 5) == generate_synthetic(spec, 300, 6));
  CHECK_THROWS_AS(generate_synthetic(spec, 0, 5), ConfigError);
}

TEST_CASE("zero label noise makes labels a function of the attributes") {
  const auto ds = generate_synthetic(chain_spec(), 2000, 8);
  for (std::size_t r = 0; r < ds.size(); ++r) CHECK(ds.labels[r] == ds.attributes(r, 0));
}

TEST_CASE("bias flips follow the chosen attribute") {
  const auto biased = chain_spec("bias.attribute = A\nbias.pos_to_neg = 0, 1\nbias.neg_to_pos = 0, 0\n");
  const auto ds = generate_synthetic(biased, 2000, 8);
  for (std::size_t r = 0; r < ds.size(); ++r) CHECK(ds.labels[r] == 0);
  const auto clean = generate_synthetic(biased.without_bias(), 2000, 8);
  CHECK(clean == generate_synthetic(chain_spec(), 2000, 8));
}

TEST_CASE("ancestral sampling matches every CPT entry") {
  const auto spec = load_synthetic_spec(std::string(BNMR_SOURCE_DIR) + "/configs/synthetic5.spec");
  const auto ds = generate_synthetic(spec, 100000, 17);
  const auto& bn = spec.attribute_bn;
  for (std::size_t v = 0; v < bn.size(); ++v) {
    const auto& parents = bn.structure().parents(v);
    const std::size_t configs = std::size_t{1} << parents.size();
    std::vector<double> ones(configs, 0.0), count(configs, 0.0);
    std::vector<std::uint32_t> bits_of(configs, 0);
    for (std::size_t r = 0; r < ds.size(); ++r) {
      std::size_t j = 0;
      std::uint32_t bits = 0;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        const auto a = ds.attributes(r, parents[k]);
        j |= std::size_t{a} << k;
        bits |= std::uint32_t{a} << parents[k];
      }
      bits_of[j] = bits;
      count[j] += 1;
      ones[j] += ds.attributes(r, v);
    }
    for (std::size_t j = 0; j < configs; ++j) {
      REQUIRE(count[j] > 0);
      const double expect = oracle::cpt_entry(bn.cpt(v), bits_of[j]);
      CHECK(std::abs(ones[j] / count[j] - expect) <= 3.0 / std::sqrt(count[j]));
    }
  }
}

TEST_CASE("pairwise phi of generated attributes matches the network") {
  const auto spec = chain_spec();
  const auto ds = generate_synthetic(spec, 50000, 23);
  const auto phi = fair::phi_matrix(ds.attributes, ds.attribute_names);
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t v = u + 1; v < 3; ++v) {
      CHECK(std::abs(phi.values(u, v) - analytic_phi(spec.attribute_bn, u, v)) <= 0.03);
    }
  }
}

TEST_CASE("invalid specs") {
  auto message = [](const std::string& key, const std::string& value) -> std::string {
    try {
      chain_spec_with(key, value);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("attributes.cpt.A", "1.5").find("attributes.cpt.A") != std::string::npos);
  CHECK(message("features.sigma", "0").find("sigma") != std::string::npos);
  CHECK_FALSE(message("label.coefficients", "1, 0").empty());
  CHECK_FALSE(message("attributes.parents.C", "Z").empty());
  CHECK(message("label.noise", "0").empty());
  CHECK_THROWS_AS(chain_spec("bias.attribute = Z\nbias.pos_to_neg = 0, 1\nbias.neg_to_pos = 0, 0\n"), ConfigError);
}
