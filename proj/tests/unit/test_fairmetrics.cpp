#include "doctest.h"

#include <cmath>
#include <random>

#include "bnmr/errors.hpp"
#include "bnmr/fairmetrics.hpp"
#include "oracles.hpp"

using namespace bnmr;
using namespace bnmr::fair;

namespace {

struct Rows {
  std::vector<std::uint8_t> pred, label;
  BinaryMatrix attrs{0, 1};
};

// y=1 rows: hits_pos of n_pos correct in group a=1, hits_neg of n_neg in a=0,
// plus `negatives` y=0 rows per group predicted 1 (they must not matter).
Rows count_table(int hits_pos, int n_pos, int hits_neg, int n_neg, int negatives = 3) {
  Rows r;
  auto add = [&](int a, int y, int p) {
    r.pred.push_back(static_cast<std::uint8_t>(p));
    r.label.push_back(static_cast<std::uint8_t>(y));
    r.attrs.append_row(std::vector<std::uint8_t>{static_cast<std::uint8_t>(a)});
  };
  for (int i = 0; i < n_pos; ++i) add(1, 1, i < hits_pos);
  for (int i = 0; i < n_neg; ++i) add(0, 1, i < hits_neg);
  for (int i = 0; i < negatives; ++i) {
    add(1, 0, 1);
    add(0, 0, i % 2);
  }
  return r;
}

data::Dataset validation_fixture() {
  data::Dataset ds;
  ds.attribute_names = {"a", "b"};
  ds.features = RealMatrix(0, 1);
  ds.attributes = BinaryMatrix(0, 2);
  // (a, b, y)
  const int rows[][3] = {{1, 0, 1}, {1, 1, 1}, {1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {0, 1, 1},
                         {1, 1, 0}, {0, 0, 0}, {1, 1, 1}, {0, 0, 1}, {1, 0, 0}, {0, 1, 1}};
  for (const auto& r : rows) {
    ds.ids.push_back("r" + std::to_string(ds.ids.size()));
    ds.features.append_row(std::vector<double>{static_cast<double>(ds.ids.size())});
    ds.attributes.append_row(std::vector<std::uint8_t>{static_cast<std::uint8_t>(r[0]), static_cast<std::uint8_t>(r[1])});
    ds.labels.push_back(static_cast<std::uint8_t>(r[2]));
  }
  return ds;
}

}  // namespace

TEST_CASE("tprd and dig on hand count tables") {
  const auto r = count_table(8, 10, 6, 10);
  const auto t = tprd(r.pred, r.label, r.attrs, {"a"});
  const auto d = dig(r.pred, r.label, r.attrs, {"a"});
  CHECK(t.per_attribute.at("a") == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(d.per_attribute.at("a") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d.mean == doctest::Approx(0.3333).epsilon(1e-4));
}

TEST_CASE("degenerate denominators") {
  auto r = count_table(5, 10, 0, 10);
  CHECK(dig(r.pred, r.label, r.attrs, {"a"}).mean == 1.0);
  CHECK(tprd(r.pred, r.label, r.attrs, {"a"}).mean == doctest::Approx(0.5));
  r = count_table(0, 10, 0, 10);
  const auto d = dig(r.pred, r.label, r.attrs, {"a"});
  CHECK(d.mean == 0.0);
  CHECK(d.notes.size() == 1);
  r = count_table(7, 10, 7, 10);
  CHECK(dig(r.pred, r.label, r.attrs, {"a"}).mean == 0.0);
  CHECK(tprd(r.pred, r.label, r.attrs, {"a"}).mean == 0.0);
}

TEST_CASE("means over attributes and undefined attributes") {
  // Attribute a: disparity 0.2; attribute b: equal TPRs.
  std::vector<std::uint8_t> pred, label;
  BinaryMatrix attrs(0, 3);
  auto add = [&](int a, int b, int y, int p) {
    pred.push_back(static_cast<std::uint8_t>(p));
    label.push_back(static_cast<std::uint8_t>(y));
    // c is constant 1 among y=1 rows, so it is undefined
    attrs.append_row(std::vector<std::uint8_t>{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                               static_cast<std::uint8_t>(y ? 1 : 0)});
  };
  for (int i = 0; i < 10; ++i) add(1, i % 2, 1, i < 8);
  for (int i = 0; i < 10; ++i) add(0, i % 2, 1, i < 6);
  add(0, 0, 0, 1);
  // b: among a=1, hits on even i (b=0) are i=0,2,4,6 (4/5) and odd (b=1) 1,3,5,7 (4/5);
  // among a=0, even 0,2,4 (3/5), odd 1,3,5 (3/5) -> b groups both 7/10.
  const auto t = tprd(pred, label, attrs, {"a", "b", "c"});
  CHECK(t.per_attribute.at("a") == doctest::Approx(0.2));
  CHECK(t.per_attribute.at("b") == 0.0);
  CHECK(t.per_attribute.count("c") == 0);
  CHECK(t.mean == doctest::Approx(0.1));
  CHECK(t.notes.size() == 1);
  CHECK(t.notes[0].find("'c'") != std::string::npos);
}

TEST_CASE("relabeling the groups does not change the metrics") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto hp = static_cast<int>(rng() % 11), hn = static_cast<int>(rng() % 11);
    auto r = count_table(hp, 10, hn, 10);
    auto flipped = r.attrs;
    for (std::size_t i = 0; i < flipped.rows(); ++i) flipped(i, 0) = 1 - flipped(i, 0);
    CHECK(tprd(r.pred, r.label, r.attrs, {"a"}).mean == tprd(r.pred, r.label, flipped, {"a"}).mean);
    CHECK(dig(r.pred, r.label, r.attrs, {"a"}).mean == dig(r.pred, r.label, flipped, {"a"}).mean);
    const bool zero_t = tprd(r.pred, r.label, r.attrs, {"a"}).mean == 0.0;
    const bool zero_d = dig(r.pred, r.label, r.attrs, {"a"}).mean == 0.0;
    if (hp + hn > 0) CHECK(zero_t == zero_d);
  }
}

TEST_CASE("demographic report") {
  auto r = count_table(9, 10, 6, 10);
  auto col = r.attrs.column(0);
  auto d = demographic_report(r.pred, r.label, col);
  CHECK(d.defined);
  CHECK(d.tprd == doctest::Approx(0.3));
  CHECK(d.dig == doctest::Approx(0.5));  // max(|1-0.6/0.9|, |1-0.9/0.6|)
  const std::vector<std::uint8_t> all_one(r.label.size(), 1);
  d = demographic_report(all_one, r.label, col);
  CHECK(d.tprd == 0.0);
  CHECK(d.dig == 0.0);
  d = demographic_report(r.label, r.label, col);
  CHECK(d.tprd == 0.0);
  CHECK(d.dig == 0.0);
  const std::vector<std::uint8_t> constant(r.label.size(), 1);
  CHECK_FALSE(demographic_report(r.pred, r.label, constant).defined);
}

TEST_CASE("length mismatches are shape errors") {
  auto r = count_table(1, 2, 1, 2);
  r.pred.pop_back();
  CHECK_THROWS_AS(tprd(r.pred, r.label, r.attrs, {"a"}), ShapeError);
  CHECK_THROWS_AS(evaluate_predictions(r.pred, r.label, r.attrs, {"a"}), ShapeError);
}

TEST_CASE("micro sets") {
  const auto val = validation_fixture();
  // y=1 rows: a=1 -> {0,1,2,8}; a=0 -> {3,4,5,9,11}
  const auto sets = sample_micro_sets(val, {"a", "b"}, 4, 7);
  REQUIRE(sets.size() == 2);
  auto pos = sets[0].pos_rows;
  std::sort(pos.begin(), pos.end());
  CHECK(pos == std::vector<std::size_t>{0, 1, 2, 8});
  for (const auto& s : sets) {
    CHECK(s.pos_rows.size() == 4);
    CHECK(s.neg_rows.size() == 4);
    for (auto r : s.pos_rows) {
      CHECK(val.labels[r] == 1);
      CHECK(val.attributes(r, s.attribute_column) == 1);
    }
    for (auto r : s.neg_rows) {
      CHECK(val.labels[r] == 1);
      CHECK(val.attributes(r, s.attribute_column) == 0);
    }
  }
  const auto again = sample_micro_sets(val, {"a", "b"}, 4, 7);
  CHECK(again[1].pos_rows == sets[1].pos_rows);
  CHECK(again[1].neg_rows == sets[1].neg_rows);

  try {
    sample_micro_sets(val, {"a"}, 11, 0);
    FAIL("expected a sampling error");
  } catch (const SamplingError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("'a'") != std::string::npos);
    CHECK(msg.find("deficit 7") != std::string::npos);
  }
  CHECK_THROWS_AS(sample_micro_sets(val, {"zzz"}, 1, 0), ConfigError);
}

TEST_CASE("phi matrix") {
  const auto coins = oracle::sample_coins(5000, 3, 12);
  const auto m = phi_matrix(coins, {"x", "y", "z"});
  for (std::size_t i = 0; i < 3; ++i) CHECK(m.values(i, i) == 1.0);
  CHECK(m.values(0, 1) == m.values(1, 0));

  BinaryMatrix with_const(4, 2);
  for (std::size_t r = 0; r < 4; ++r) with_const(r, 0) = r % 2;
  const auto d = phi_matrix(with_const, {"v", "flat"});
  CHECK(d.degenerate == std::vector<std::string>{"flat"});
  CHECK(d.values(1, 1) == 0.0);
  CHECK(d.values(0, 1) == 0.0);
  CHECK(phi_to_csv(d) == "attribute,v,flat\nv,1.0000,0.0000\nflat,0.0000,0.0000\n");
}

TEST_CASE("independent coins have small phi") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = phi_matrix(oracle::sample_coins(5000, 2, 300 + seed), {"p", "q"});
    if (m.values(0, 1) < 0.05) ++ok;
  }
  CHECK(ok >= 9);
}

TEST_CASE("report text") {
  const auto r = count_table(8, 10, 6, 10);
  auto rep = evaluate_predictions(r.pred, r.label, r.attrs, {"a"});
  CHECK(rep.mean_tprd == rep.per_attribute_tprd.at("a"));
  rep.demographic = DemographicResult{0.25, 0.5, true};
  rep.demographic_name = "g";
  const auto text = report_to_text(rep);
  CHECK(text.find("accuracy=") == 0);
  CHECK(text.find("\nmean_tprd=0.2") != std::string::npos);
  CHECK(text.find("\nper_attribute.tprd.a=") != std::string::npos);
  CHECK(text.find("\nper_attribute.dig.a=0.333333333333333") != std::string::npos);
  CHECK(text.find("\ndemographic.tprd=0.25\n") != std::string::npos);
  CHECK(text.find("\ndemographic.dig=0.5\n") != std::string::npos);
}
