#include "lifegraph/analysis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lifegraph {

DegreeHistogram degree_histogram(const LifeGraph& graph) {
    std::unordered_map<std::string, long> degree;
    for (const auto& id : graph.node_order()) degree[id] = 0;
    for (const auto& eid : graph.edge_order()) {
        const HyperEdge* e = graph.edge(eid);
        ++degree[e->subject];
        ++degree[e->object];  // self-loop counts twice
    }
    DegreeHistogram hist;
    for (const auto& [id, d] : degree) ++hist[d];
    return hist;
}

PowerLawFit powerlaw_fit(const DegreeHistogram& histogram) {
    std::vector<double> xs, ys;
    for (const auto& [d, f] : histogram) {
        if (d <= 0 || f <= 0) continue;  // log undefined
        xs.push_back(std::log(static_cast<double>(d)));
        ys.push_back(std::log(static_cast<double>(f)));
    }
    if (xs.size() < 3) {
        throw GraphError("powerlaw_fit: need >= 3 distinct positive degrees, have " +
                         std::to_string(xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    double cov = n * sxy - sx * sy;
    double var_x = n * sxx - sx * sx;
    double var_y = n * syy - sy * sy;
    double slope = cov / var_x;
    double r2 = var_y == 0.0 ? 1.0 : (cov * cov) / (var_x * var_y);
    return {-slope, r2};
}

namespace {

// node index adjacency for BFS, unique neighbors
struct UndirectedView {
    std::vector<std::string> ids;
    std::unordered_map<std::string, int> index;
    std::vector<std::vector<int>> adj;

    explicit UndirectedView(const LifeGraph& graph) {
        ids = graph.node_order();
        for (size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
        adj.resize(ids.size());
        std::vector<std::unordered_set<int>> seen(ids.size());
        for (const auto& eid : graph.edge_order()) {
            const HyperEdge* e = graph.edge(eid);
            int u = index[e->subject];
            int v = index[e->object];
            if (u == v) continue;
            if (seen[static_cast<size_t>(u)].insert(v).second) {
                adj[static_cast<size_t>(u)].push_back(v);
                adj[static_cast<size_t>(v)].push_back(u);
                seen[static_cast<size_t>(v)].insert(u);
            }
        }
    }
};

std::vector<std::vector<int>> find_components(const UndirectedView& view) {
    std::vector<std::vector<int>> comps;
    std::vector<bool> visited(view.ids.size(), false);
    for (size_t s = 0; s < view.ids.size(); ++s) {
        if (visited[s]) continue;
        std::vector<int> comp;
        std::deque<int> queue{static_cast<int>(s)};
        visited[s] = true;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            comp.push_back(u);
            for (int v : view.adj[static_cast<size_t>(u)]) {
                if (!visited[static_cast<size_t>(v)]) {
                    visited[static_cast<size_t>(v)] = true;
                    queue.push_back(v);
                }
            }
        }
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return comps;
}

}  // namespace

std::vector<size_t> component_sizes(const LifeGraph& graph) {
    UndirectedView view(graph);
    std::vector<size_t> sizes;
    for (const auto& c : find_components(view)) sizes.push_back(c.size());
    return sizes;
}

int diameter(const LifeGraph& graph) {
    if (graph.node_count() == 0) throw GraphError("diameter: empty graph");
    UndirectedView view(graph);
    auto comps = find_components(view);
    const auto& comp = comps.front();

    int diam = 0;
    std::vector<int> dist(view.ids.size());
    for (int src : comp) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[static_cast<size_t>(src)] = 0;
        std::deque<int> queue{src};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            diam = std::max(diam, dist[static_cast<size_t>(u)]);
            for (int v : view.adj[static_cast<size_t>(u)]) {
                if (dist[static_cast<size_t>(v)] < 0) {
                    dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    return diam;
}

DepthStats effective_depth_stats(const LifeGraph& graph, const std::vector<Query>& queries,
                                 const std::vector<int>& depth_limits, int width,
                                 ModelClient& model, const MediaStore* media_store,
                                 bool with_refs) {
    DepthStats stats;
    for (int limit : depth_limits) {
        double sum = 0;
        int ok = 0;
        int failed = 0;
        for (const auto& q : queries) {
            RetrievalOptions opts;
            opts.depth = limit;
            opts.width = width;
            opts.with_refs = with_refs;
            try {
                auto ctx = retrieve(q, graph, opts, model, media_store);
                sum += ctx.effective_depth;
                ++ok;
            } catch (const Error&) {
                ++failed;
            }
        }
        stats.mean_per_limit[limit] = ok > 0 ? sum / ok : 0.0;
        stats.failures_per_limit[limit] = failed;
    }
    return stats;
}

StructureReport analyze(const LifeGraph& graph) {
    StructureReport report;
    report.node_count = graph.node_count();
    report.edge_count = graph.edge_count();
    if (graph.node_count() > 0) {
        report.component_sizes = component_sizes(graph);
        report.diameter = diameter(graph);
        try {
            report.powerlaw = powerlaw_fit(degree_histogram(graph));
        } catch (const GraphError&) {
            report.powerlaw = std::nullopt;
        }
    }
    return report;
}

std::string report_to_json(const StructureReport& report) {
    nlohmann::ordered_json doc;
    doc["node_count"] = report.node_count;
    doc["edge_count"] = report.edge_count;
    doc["component_sizes"] = report.component_sizes;
    doc["diameter"] = report.diameter;
    if (report.powerlaw) {
        doc["powerlaw"] = {{"exponent", report.powerlaw->exponent},
                           {"r2", report.powerlaw->r2}};
    } else {
        doc["powerlaw"] = nullptr;
    }
    if (!report.mean_effective_depth.empty()) {
        nlohmann::ordered_json depths = nlohmann::ordered_json::object();
        for (const auto& [limit, mean] : report.mean_effective_depth) {
            depths[std::to_string(limit)] = mean;
        }
        doc["mean_effective_depth"] = std::move(depths);
    }
    return doc.dump(2);
}

std::string histogram_to_text(const DegreeHistogram& histogram) {
    std::ostringstream out;
    out << "# degree count\n";
    for (const auto& [d, f] : histogram) out << d << " " << f << "\n";
    return out.str();
}

}  // namespace lifegraph
