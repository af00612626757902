#pragma once
// Structural analysis: undirected degree distribution, log-log power-law fit,
// exact BFS diameter on the largest component, retrieval-depth statistics.

#include "lifegraph/graph.hpp"
#include "lifegraph/model_client.hpp"
#include "lifegraph/retrieval.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lifegraph {

// degree -> node count; counts sum to the node count.
using DegreeHistogram = std::map<long, long>;

struct PowerLawFit {
    double exponent;  // negated slope of the log-log least-squares line
    double r2;
};

struct StructureReport {
    size_t node_count = 0;
    size_t edge_count = 0;
    std::vector<size_t> component_sizes;  // descending
    int diameter = 0;                     // largest connected component
    std::optional<PowerLawFit> powerlaw;  // absent when too few distinct degrees
    std::map<int, double> mean_effective_depth;  // per depth limit, when computed
};

// Undirected degree (in + out); parallel edges counted.
DegreeHistogram degree_histogram(const LifeGraph& graph);

// Least squares on (log degree, log frequency), zero-frequency degrees
// excluded. Requires >= 3 distinct positive degrees, else throws GraphError.
PowerLawFit powerlaw_fit(const DegreeHistogram& histogram);

// Exact max eccentricity (BFS from every node) on the largest connected
// component. Requires >= 1 node.
int diameter(const LifeGraph& graph);

std::vector<size_t> component_sizes(const LifeGraph& graph);

struct DepthStats {
    std::map<int, double> mean_per_limit;
    std::map<int, int> failures_per_limit;  // excluded from the mean, counted
};

DepthStats effective_depth_stats(const LifeGraph& graph, const std::vector<Query>& queries,
                                 const std::vector<int>& depth_limits, int width,
                                 ModelClient& model, const MediaStore* media_store = nullptr,
                                 bool with_refs = true);

StructureReport analyze(const LifeGraph& graph);

std::string report_to_json(const StructureReport& report);

// gnuplot-friendly "degree count" lines.
std::string histogram_to_text(const DegreeHistogram& histogram);

}  // namespace lifegraph
