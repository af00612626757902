#pragma once
// Shared test helpers: fixture paths, seeded random graphs, and a brute-force
// neighbor scan used as an oracle against LifeGraph::neighbors.

#include "lifegraph/graph.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
    return std::string(LIFEGRAPH_FIXTURE_DIR) + "/" + name;
}

// Random graph with up to max_nodes nodes and max_edges edges; labels and
// relations come from small pools so deduplication paths get exercised too.
inline lifegraph::LifeGraph random_graph(std::mt19937_64& rng, int max_nodes, int max_edges) {
    using namespace lifegraph;
    LifeGraph g;
    std::uniform_int_distribution<int> nnodes(1, max_nodes);
    std::uniform_int_distribution<int> kind_dist(0, 5);
    int n = nnodes(rng);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        EntityKind kind = static_cast<EntityKind>(kind_dist(rng));
        NodeAttrs attrs;
        if (rng() % 3 == 0) attrs.emplace_back("note", "n" + std::to_string(rng() % 7));
        ids.push_back(g.add_node(kind, "node " + std::to_string(i), std::move(attrs)));
    }
    if (max_edges > 0) {
        std::uniform_int_distribution<int> nedges(0, max_edges);
        std::uniform_int_distribution<size_t> pick(0, ids.size() - 1);
        int m = nedges(rng);
        for (int i = 0; i < m; ++i) {
            EdgeAttrs attrs;
            if (rng() % 4 == 0) {
                attrs.emplace_back("qual",
                                   std::vector<std::string>{"v" + std::to_string(rng() % 5)});
            }
            g.add_edge(ids[pick(rng)], "rel" + std::to_string(rng() % 5), ids[pick(rng)],
                       std::move(attrs));
        }
    }
    return g;
}

// Independent adjacency oracle: scan every edge instead of using the index.
inline std::vector<lifegraph::Neighbor> brute_force_neighbors(const lifegraph::LifeGraph& g,
                                                              const std::string& node_id) {
    using namespace lifegraph;
    std::vector<Neighbor> out;
    for (const auto& eid : g.edge_order()) {
        const HyperEdge* e = g.edge(eid);
        if (e->subject == node_id) out.push_back({eid, e->object, Direction::Outgoing});
        if (e->object == node_id && e->subject != node_id) {
            out.push_back({eid, e->subject, Direction::Incoming});
        }
    }
    return out;
}

}  // namespace testsupport
