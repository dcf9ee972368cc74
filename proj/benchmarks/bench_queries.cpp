#include "adtmas/dsl.hpp"
#include "adtmas/engine.hpp"
#include "adtmas/synth.hpp"
#include "adtmas/transform.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace adtmas;

namespace {

AdtModel load(const std::string& name) {
    std::ifstream in(std::string(ADTMAS_MODELS_DIR) + "/" + name + ".adt");
    std::stringstream ss;
    ss << in.rdbuf();
    auto r = parse(ss.str(), name);
    if (!r.ok()) throw std::runtime_error("cannot load " + name);
    return *r.model;
}

const char* const kModels[] = {"treasure", "forestall", "iot-dev", "gain-admin"};
const char* const kVariants[] = {"treasure", "forestall-id", "iot-dev-inc", "gain-admin-tla"};

void BM_Parse(benchmark::State& st) {
    auto text = serialize(load(kModels[st.range(0)]));
    for (auto _ : st) benchmark::DoNotOptimize(parse(text));
    st.SetLabel(kModels[st.range(0)]);
}

void BM_Transform(benchmark::State& st) {
    auto m = load(kModels[st.range(0)]);
    for (auto _ : st) benchmark::DoNotOptimize(transform(m));
    st.SetLabel(kModels[st.range(0)]);
}

void query(benchmark::State& st, QueryKind kind, const std::string& attr, bool reduction) {
    auto net = transform(load(kModels[st.range(0)]));
    EngineOptions opt;
    opt.workers = static_cast<unsigned>(st.range(1));
    opt.reduction = reduction;
    std::size_t states = 0;
    for (auto _ : st) {
        auto r = check(net, Query{kind, attr, "root_ok"}, opt);
        states = r.stats.states;
        benchmark::DoNotOptimize(r.value);
    }
    st.counters["states"] = static_cast<double>(states);
    st.SetLabel(kModels[st.range(0)]);
}

void BM_MinTime(benchmark::State& st) { query(st, QueryKind::MinAttr, "time", true); }
void BM_MaxCost(benchmark::State& st) { query(st, QueryKind::MaxAttr, "cost", true); }
void BM_Feasible(benchmark::State& st) { query(st, QueryKind::Feasible, "time", true); }
void BM_MinTimeUnreduced(benchmark::State& st) { query(st, QueryKind::MinAttr, "time", false); }

void BM_SynthesizeBlocking(benchmark::State& st) {
    auto m = load(kVariants[st.range(0)]);
    for (auto _ : st) benchmark::DoNotOptimize(synthesize_blocking(m));
    st.SetLabel(kVariants[st.range(0)]);
}

void models(benchmark::internal::Benchmark* b) {
    for (int i = 0; i < 4; ++i) b->Args({i, 1});
}

}  // namespace

BENCHMARK(BM_Parse)->DenseRange(0, 3);
BENCHMARK(BM_Transform)->DenseRange(0, 3);
BENCHMARK(BM_Feasible)->Apply(models)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinTime)->Apply(models)->Args({3, 2})->Args({3, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaxCost)->Apply(models)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinTimeUnreduced)->Args({0, 1})->Args({2, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SynthesizeBlocking)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
