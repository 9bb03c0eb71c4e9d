// Serial reference kernels against their OpenMP versions, plus per-sweep chain cost.

#include <benchmark/benchmark.h>

#include <memory>

#include "cgmc/oracles.hpp"

namespace {

using namespace cgmc;

MicroParams params(int n) { return MicroParams{n, constant_kernel(1.0, 3), FieldSpec::uniform(0.1), 0.7}; }

void BM_EnumerateSerial(benchmark::State& st) {
    const auto p = params(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(enumerate_micro_serial(p).log_z);
}
void BM_EnumerateParallel(benchmark::State& st) {
    const auto p = params(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(enumerate_micro(p).log_z);
}
void BM_KadanoffSerial(benchmark::State& st) {
    const auto p = params(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kadanoff_table_serial(p, 4).log_z_micro);
}
void BM_KadanoffParallel(benchmark::State& st) {
    const auto p = params(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kadanoff_table(p, 4).log_z_micro);
}

void BM_Sweep(benchmark::State& st) {
    ModelSpec s;
    s.scheme = static_cast<Scheme>(st.range(0));
    s.n_sites = 512;
    s.q = s.scheme == Scheme::micro ? 1 : 8;
    s.kernel = constant_kernel(1.0, 8);
    s.beta = 2.0;
    Chain chain(std::make_shared<const Model>(s), make_stream(1, 0));
    for (auto _ : st) chain.sweep();
    st.SetLabel(to_string(s.scheme));
}

}  // namespace

BENCHMARK(BM_EnumerateSerial)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KadanoffSerial)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KadanoffParallel)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
