#include <benchmark/benchmark.h>

#include <string>

#include "ctmdp/check.hpp"
#include "ctmdp/formats.hpp"
#include "ctmdp/learn.hpp"
#include "ctmdp/product.hpp"

using namespace ctmdp;

namespace {

std::string path(const std::string& file) { return std::string(CTMDP_BENCH_MODELS_DIR) + "/" + file; }

const ModelSource& polling_source() {
  static const ModelSource src = read_model_file(path("polling.ctmdp"));
  return src;
}

struct Polling {
  Ctmdp model = parse_model(polling_source());
  BuchiAutomaton automaton = parse_hoa(read_hoa_file(path("polling.hoa")));
  ProductCtmdp product = build_product(model, automaton);
};

const Polling& polling() {
  static const Polling p;
  return p;
}

void BM_ParseModel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_model(polling_source()));
}
BENCHMARK(BM_ParseModel);

void BM_BuildProduct(benchmark::State& state) {
  const Polling& p = polling();
  for (auto _ : state) benchmark::DoNotOptimize(build_product(p.model, p.automaton));
  state.counters["states"] = static_cast<double>(p.product.num_states());
}
BENCHMARK(BM_BuildProduct);

void BM_PsemOptimal(benchmark::State& state) {
  const Polling& p = polling();
  for (auto _ : state) benchmark::DoNotOptimize(psem_optimal(p.product));
}
BENCHMARK(BM_PsemOptimal)->Unit(benchmark::kMillisecond);

void BM_EsemOptimal(benchmark::State& state) {
  const Polling& p = polling();
  for (auto _ : state) benchmark::DoNotOptimize(esem_optimal(p.product));
}
BENCHMARK(BM_EsemOptimal)->Unit(benchmark::kMillisecond);

void BM_LearnSat(benchmark::State& state) {
  const Polling& p = polling();
  Hyperparams hp;
  hp.ep_n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(learn_sat(p.model, p.automaton, hp, seed++).q);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LearnSat)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LearnExp(benchmark::State& state) {
  const Polling& p = polling();
  Hyperparams hp;
  hp.ep_n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(learn_exp(p.model, p.automaton, hp, seed++).q);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LearnExp)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
