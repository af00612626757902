#include "lifegraph/construction.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace lifegraph;

static void BM_PackBatches(benchmark::State& state) {
    std::mt19937_64 rng(11);
    std::vector<HistoryEvent> history;
    for (int i = 0; i < state.range(0); ++i) {
        HistoryEvent ev;
        ev.date = "2023-01-01";
        ev.description = std::string(20 + rng() % 400, 'x');
        int imgs = static_cast<int>(rng() % 4);
        for (int m = 0; m < imgs; ++m) ev.images.push_back({"m.txt", ev.date});
        history.push_back(std::move(ev));
    }
    ConstructionConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pack_batches(history, cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PackBatches)->Arg(1000)->Arg(10000);
