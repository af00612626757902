#include "lifegraph/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "support.hpp"

using namespace lifegraph;

namespace {

// Independent all-pairs-shortest-paths oracle (Floyd-Warshall) for the
// diameter, restricted to the largest connected component.
int fw_diameter(const LifeGraph& g) {
    const auto& ids = g.node_order();
    size_t n = ids.size();
    std::vector<size_t> index(n);
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, 1 << 20));
    std::unordered_map<std::string, size_t> idx;
    for (size_t i = 0; i < n; ++i) {
        idx[ids[i]] = i;
        dist[i][i] = 0;
    }
    for (const auto& eid : g.edge_order()) {
        const HyperEdge* e = g.edge(eid);
        size_t u = idx[e->subject], v = idx[e->object];
        if (u == v) continue;
        dist[u][v] = 1;
        dist[v][u] = 1;
    }
    for (size_t k = 0; k < n; ++k) {
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];
            }
        }
    }
    // union components by reachability; find the largest one
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (size_t i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        for (size_t j = 0; j < n; ++j) {
            if (dist[i][j] < (1 << 20)) comp[j] = ncomp;
        }
        ++ncomp;
    }
    std::vector<size_t> sizes(static_cast<size_t>(ncomp), 0);
    for (size_t i = 0; i < n; ++i) ++sizes[static_cast<size_t>(comp[i])];
    int best = 0;
    for (int c = 1; c < ncomp; ++c) {
        if (sizes[static_cast<size_t>(c)] > sizes[static_cast<size_t>(best)]) best = c;
    }
    int diam = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (comp[i] == best && comp[j] == best && dist[i][j] < (1 << 20)) {
                diam = std::max(diam, dist[i][j]);
            }
        }
    }
    return diam;
}

LifeGraph path_graph(int n) {
    LifeGraph g;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        ids.push_back(g.add_node(EntityKind::Object, "p" + std::to_string(i)));
    }
    for (int i = 0; i + 1 < n; ++i) g.add_edge(ids[i], "next", ids[i + 1]);
    return g;
}

LifeGraph cycle_graph(int n) {
    LifeGraph g;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        ids.push_back(g.add_node(EntityKind::Object, "c" + std::to_string(i)));
    }
    for (int i = 0; i < n; ++i) g.add_edge(ids[i], "next", ids[(i + 1) % n]);
    return g;
}

}  // namespace

TEST_CASE("degree_histogram: star, self-loop, parallel edges") {
    SUBCASE("star with five leaves") {
        LifeGraph g;
        std::string hub = g.add_node(EntityKind::PersonAnimal, "hub");
        for (int i = 0; i < 5; ++i) {
            g.add_edge(hub, "r", g.add_node(EntityKind::Object, "leaf " + std::to_string(i)));
        }
        DegreeHistogram h = degree_histogram(g);
        CHECK(h == DegreeHistogram{{1, 5}, {5, 1}});
    }

    SUBCASE("a self-loop contributes two to the degree") {
        LifeGraph g;
        std::string a = g.add_node(EntityKind::Object, "a");
        g.add_edge(a, "self", a);
        CHECK(degree_histogram(g) == DegreeHistogram{{2, 1}});
    }

    SUBCASE("parallel edges (distinct relations) each count") {
        LifeGraph g;
        std::string a = g.add_node(EntityKind::Object, "a");
        std::string b = g.add_node(EntityKind::Object, "b");
        g.add_edge(a, "r1", b);
        g.add_edge(a, "r2", b);
        CHECK(degree_histogram(g) == DegreeHistogram{{2, 2}});
    }

    SUBCASE("counts always sum to the node count") {
        std::mt19937_64 rng(5150);
        for (int trial = 0; trial < 30; ++trial) {
            LifeGraph g = testsupport::random_graph(rng, 80, 160);
            long total = 0;
            long degree_sum = 0;
            for (const auto& [d, f] : degree_histogram(g)) {
                total += f;
                degree_sum += d * f;
            }
            CHECK(total == static_cast<long>(g.node_count()));
            CHECK(degree_sum == 2 * static_cast<long>(g.edge_count()));
        }
    }
}

TEST_CASE("powerlaw_fit recovers an exact power law") {
    // freq(d) = 1000 * d^-2 over degrees where that is integral
    DegreeHistogram h = {{1, 1000}, {2, 250}, {5, 40}, {10, 10}};
    PowerLawFit fit = powerlaw_fit(h);
    CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("powerlaw_fit is invariant under frequency scaling") {
    std::mt19937_64 rng(8080);
    for (int trial = 0; trial < 20; ++trial) {
        DegreeHistogram h;
        int n = 3 + static_cast<int>(rng() % 6);
        long d = 1;
        for (int i = 0; i < n; ++i) {
            d += 1 + static_cast<long>(rng() % 4);
            h[d] = 1 + static_cast<long>(rng() % 500);
        }
        PowerLawFit base = powerlaw_fit(h);
        DegreeHistogram scaled;
        for (const auto& [deg, f] : h) scaled[deg] = f * 7;
        PowerLawFit s = powerlaw_fit(scaled);
        CHECK(s.exponent == doctest::Approx(base.exponent).epsilon(1e-9));
        CHECK(s.r2 == doctest::Approx(base.r2).epsilon(1e-9));
    }
}

TEST_CASE("powerlaw_fit preconditions") {
    CHECK_THROWS_AS(powerlaw_fit({{1, 10}, {2, 5}}), GraphError);  // two distinct degrees
    CHECK_THROWS_AS(powerlaw_fit({{0, 10}, {1, 5}, {2, 3}}), GraphError);  // zero excluded
    CHECK_NOTHROW(powerlaw_fit({{1, 10}, {2, 5}, {3, 2}}));
}

TEST_CASE("diameter: known shapes") {
    CHECK(diameter(path_graph(5)) == 4);
    CHECK(diameter(cycle_graph(6)) == 3);

    LifeGraph single;
    single.add_node(EntityKind::Object, "only");
    CHECK(diameter(single) == 0);

    LifeGraph empty;
    CHECK_THROWS_AS(diameter(empty), GraphError);

    // disconnected: the largest component decides
    LifeGraph g = path_graph(7);
    g.add_node(EntityKind::Object, "lonely");
    g.add_edge(g.add_node(EntityKind::Object, "x"), "r", g.add_node(EntityKind::Object, "y"));
    CHECK(diameter(g) == 6);
}

TEST_CASE("diameter matches a Floyd-Warshall oracle on random graphs") {
    std::mt19937_64 rng(60646);
    for (int trial = 0; trial < 40; ++trial) {
        LifeGraph g = testsupport::random_graph(rng, 40, 80);
        CHECK(diameter(g) == fw_diameter(g));
    }
}

TEST_CASE("component_sizes sorted descending and summing to node count") {
    LifeGraph g = path_graph(4);
    g.add_node(EntityKind::Object, "alone");
    std::string a = g.add_node(EntityKind::Object, "pair a");
    g.add_edge(a, "r", g.add_node(EntityKind::Object, "pair b"));
    auto sizes = component_sizes(g);
    CHECK(sizes == std::vector<size_t>{4, 2, 1});
}

TEST_CASE("effective_depth_stats: exact at limit 1, monotone after") {
    LifeGraph g = path_graph(8);
    ScriptedMock mock;  // "{}": lexical seeds, uniform prune, never sufficient
    std::vector<Query> queries;
    for (int i = 0; i < 6; ++i) {
        Query q;
        q.text = "p" + std::to_string(i);
        queries.push_back(q);
    }
    DepthStats stats = effective_depth_stats(g, queries, {1, 2, 3, 4}, 3, mock);
    CHECK(stats.mean_per_limit[1] == 1.0);  // exact, not approximate
    double prev = 0;
    for (int limit : {1, 2, 3, 4}) {
        CHECK(stats.mean_per_limit[limit] >= prev);
        CHECK(stats.mean_per_limit[limit] <= limit);
        CHECK(stats.failures_per_limit[limit] == 0);
        prev = stats.mean_per_limit[limit];
    }

    // a failing query (empty text) is counted and excluded from the mean
    queries.push_back(Query{});
    DepthStats with_fail = effective_depth_stats(g, queries, {1}, 3, mock);
    CHECK(with_fail.failures_per_limit[1] == 1);
    CHECK(with_fail.mean_per_limit[1] == 1.0);
}

TEST_CASE("analyze + report_to_json round out the structure report") {
    LifeGraph g = path_graph(5);
    StructureReport r = analyze(g);
    CHECK(r.node_count == 5);
    CHECK(r.edge_count == 4);
    CHECK(r.diameter == 4);
    CHECK(r.component_sizes == std::vector<size_t>{5});
    CHECK_FALSE(r.powerlaw.has_value());  // only degrees 1 and 2 present

    std::string json = report_to_json(r);
    CHECK(json.find("\"diameter\": 4") != std::string::npos);
    CHECK(json.find("\"powerlaw\": null") != std::string::npos);

    std::string hist = histogram_to_text(degree_histogram(g));
    CHECK(hist == "# degree count\n1 2\n2 3\n");
}
