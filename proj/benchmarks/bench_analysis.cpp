#include "lifegraph/analysis.hpp"
#include "lifegraph/graph.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace lifegraph;

namespace {

// connected random graph: spanning tree plus extra edges
LifeGraph connected_graph(int nodes, int extra_edges) {
    std::mt19937_64 rng(7);
    LifeGraph g;
    std::vector<std::string> ids;
    ids.reserve(static_cast<size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        ids.push_back(g.add_node(EntityKind::Object, "v" + std::to_string(i)));
    }
    for (int i = 1; i < nodes; ++i) {
        g.add_edge(ids[rng() % static_cast<uint64_t>(i)], "rel", ids[static_cast<size_t>(i)]);
    }
    for (int i = 0; i < extra_edges; ++i) {
        g.add_edge(ids[rng() % ids.size()], "x" + std::to_string(i % 4), ids[rng() % ids.size()]);
    }
    return g;
}

}  // namespace

static void BM_DegreeHistogram(benchmark::State& state) {
    LifeGraph g = connected_graph(static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(degree_histogram(g));
    }
}
BENCHMARK(BM_DegreeHistogram)->Arg(1000)->Arg(10000);

static void BM_Diameter(benchmark::State& state) {
    LifeGraph g = connected_graph(static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(0)) / 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(diameter(g));
    }
}
BENCHMARK(BM_Diameter)->Arg(200)->Arg(500)->Arg(1000);
