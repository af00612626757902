#include "lifegraph/graph.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <vector>

using namespace lifegraph;

namespace {

LifeGraph make_graph(int nodes, int edges) {
    std::mt19937_64 rng(42);
    LifeGraph g;
    std::vector<std::string> ids;
    ids.reserve(static_cast<size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        ids.push_back(g.add_node(EntityKind::Object, "node " + std::to_string(i)));
    }
    for (int i = 0; i < edges; ++i) {
        g.add_edge(ids[rng() % ids.size()], "rel" + std::to_string(rng() % 8),
                   ids[rng() % ids.size()]);
    }
    return g;
}

}  // namespace

static void BM_AddNodeDedup(benchmark::State& state) {
    for (auto _ : state) {
        LifeGraph g;
        for (int i = 0; i < state.range(0); ++i) {
            benchmark::DoNotOptimize(
                g.add_node(EntityKind::Object, "node " + std::to_string(i % 100)));
        }
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AddNodeDedup)->Arg(1000)->Arg(10000);

static void BM_Neighbors(benchmark::State& state) {
    LifeGraph g = make_graph(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 4);
    const auto& ids = g.node_order();
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(g.neighbors(ids[i++ % ids.size()]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Neighbors)->Arg(1000)->Arg(10000);

static void BM_PersistLoadRoundTrip(benchmark::State& state) {
    LifeGraph g = make_graph(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 2);
    for (auto _ : state) {
        std::stringstream buf;
        g.persist(buf);
        LifeGraph loaded = LifeGraph::load(buf);
        benchmark::DoNotOptimize(loaded.node_count());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PersistLoadRoundTrip)->Arg(1000)->Arg(5000);

BENCHMARK_MAIN();
