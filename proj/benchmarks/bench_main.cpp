#include <benchmark/benchmark.h>

#include <random>

#include "bnmr/inference.hpp"
#include "bnmr/structure.hpp"
#include "bnmr/synthetic.hpp"
#include "bnmr/trainer.hpp"

using namespace bnmr;

namespace {

bayes::BayesianNetwork chain_network(std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> parents(n);
  std::vector<bayes::Cpt> cpts;
  for (std::size_t v = 0; v < n; ++v) {
    names.push_back("N" + std::to_string(v));
    if (v > 0) parents[v] = {v - 1};
    cpts.push_back(v == 0 ? bayes::Cpt{v, {}, {0.4}} : bayes::Cpt{v, {v - 1}, {0.2, 0.85}});
  }
  return bayes::append_prediction_node(bayes::BayesianNetwork(bayes::DagStructure(names, parents), cpts));
}

}  // namespace

static void BM_CalibrationPairs(benchmark::State& state) {
  const auto bn = chain_network(static_cast<std::size_t>(state.range(0)));
  std::vector<std::string> names;
  for (std::size_t v = 0; v + 1 < bn.size(); ++v) names.push_back(bn.structure().name(v));
  for (auto _ : state) benchmark::DoNotOptimize(bayes::calibration_pairs(bn, names));
}
BENCHMARK(BM_CalibrationPairs)->DenseRange(2, 6, 2);

static void BM_PerSampleGrads(benchmark::State& state) {
  const std::vector<std::size_t> dims{8, static_cast<std::size_t>(state.range(0)), 1};
  const auto p = nn::init_classifier(dims, 0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  RealMatrix x(16, 8);
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t c = 0; c < 8; ++c) x(r, c) = g(rng);
  }
  std::vector<nn::Sample> batch;
  for (std::size_t r = 0; r < 16; ++r) batch.push_back({x.row(r), static_cast<int>(r % 2)});
  for (auto _ : state) benchmark::DoNotOptimize(nn::per_sample_loss_and_grad(p, batch));
}
BENCHMARK(BM_PerSampleGrads)->Arg(16)->Arg(64);

static void BM_K2Search(benchmark::State& state) {
  const auto cols = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  BinaryMatrix m(2000, cols);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = (rng() >> 7) & 1u;
    m(r, cols - 1) = (rng() % 5 == 0) ? m(r, 0) ^ 1u : m(r, 0);
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < cols; ++c) names.push_back("v" + std::to_string(c));
  for (auto _ : state) benchmark::DoNotOptimize(bayes::learn_structure(m, names));
}
BENCHMARK(BM_K2Search)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_TrainStep(benchmark::State& state) {
  const auto spec = data::load_synthetic_spec(BNMR_SOURCE_DIR "/configs/synthetic5.spec");
  const auto train = data::generate_synthetic(spec, 2000, 1);
  const auto val = data::generate_synthetic(spec.without_bias(), 500, 2);
  meta::TrainConfig cfg;
  cfg.attributes = {"brow", "beard", "jaw", "nose", "lips"};
  cfg.mode = state.range(0) ? meta::Mode::kBnmr : meta::Mode::kVanilla;
  const auto sets = fair::sample_micro_sets(val, cfg.attributes, 10, 3);
  meta::StepContext ctx;
  ctx.train = &train;
  ctx.validation = &val;
  ctx.micro_sets = sets;
  for (const auto& a : cfg.attributes) ctx.attribute_columns.push_back(train.attribute_index(a));
  meta::TrainState st;
  st.params = nn::init_classifier(std::vector<std::size_t>{train.feature_dim(), 16, 1}, 0);
  if (cfg.calibrates()) {
    st.network = meta::build_calibration_network(train, cfg);
    st.calibration = bayes::calibration_pairs(*st.network, cfg.attributes);
  }
  std::size_t k = 0;
  std::vector<std::size_t> batch(16);
  for (auto _ : state) {
    for (std::size_t i = 0; i < 16; ++i) batch[i] = (k * 16 + i) % train.size();
    st = meta::bnmr_train_step(std::move(st), batch, ctx, cfg);
    ++k;
  }
  state.SetLabel(state.range(0) ? "bnmr" : "vanilla");
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1);
BENCHMARK_MAIN();
