#pragma once
// Beam-search graph retriever: TopEntities seeding, unified search-prune
// expansion over the undirected view, on-demand source-data fetching, and
// reasoning-based early termination. answer() wraps retrieval with the final
// generation call.

#include "lifegraph/graph.hpp"
#include "lifegraph/model_client.hpp"
#include "lifegraph/vaccount.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lifegraph {

struct Query {
    std::string text;  // non-empty
    std::vector<MediaPayload> media;
    std::string vaccount_id;
};

// Simple path: n0, (e1, n1), ..., (e_t, n_t); no node repeats.
struct Path {
    std::vector<std::string> nodes;
    std::vector<std::string> edges;  // edges.size() + 1 == nodes.size()

    const std::string& terminal() const { return nodes.back(); }
    bool contains(const std::string& node_id) const {
        for (const auto& n : nodes) {
            if (n == node_id) return true;
        }
        return false;
    }
    bool operator==(const Path&) const = default;
};

struct ResolvedRef {
    std::string media_id;
    std::string date;
    std::optional<MediaPayload> payload;  // empty when the store could not resolve
};

struct RetrievedContext {
    std::vector<Path> paths;        // seed paths plus every retained extension
    std::vector<ResolvedRef> refs;  // ordered, capped at max_refs
    int effective_depth = 0;
    std::vector<std::string> diagnostics;
};

struct RetrievalOptions {
    int depth = 3;  // d
    int width = 3;  // k
    bool with_refs = true;
    int max_refs = 8;
    bool lexical_only = false;  // skip the model stage of top_entities
};

// A frontier expansion candidate, annotated with the path it extends.
struct SearchCandidate {
    size_t path_index;
    std::string edge_id;
    std::string node_id;
};

struct PruneScore {
    size_t candidate_index;
    double score;  // in [0,1]
    int rank;      // 1..#candidates, a permutation
};

struct PruneResult {
    std::vector<PruneScore> scores;   // rank order
    std::vector<size_t> retained;     // candidate indices, top-k by rank
};

// Lexical relevance of a node to the query tokens (label matches weigh double).
// Exposed so tests can check the ranking against a brute-force oracle.
double lexical_score(const Node& node, const std::set<std::string>& query_tokens);

// Two-stage seed selection: lexical ranking over all nodes, then (unless
// lexical_only) the model picks <=k out of the top-3k. Ties break on
// (score desc, node id asc). Throws GraphError on an empty graph.
std::vector<std::string> top_entities(const Query& query, const LifeGraph& graph, int k,
                                      ModelClient& model, bool lexical_only = false);

// All undirected neighbors of each frontier path's terminal node, minus nodes
// already on that path.
std::vector<SearchCandidate> search_candidates(const LifeGraph& graph,
                                               const std::vector<Path>& frontier);

// Model-scored top-k selection. Unparsable scores fall back to a uniform 0.5;
// ties break on (score desc, node id asc, edge id asc, path index asc).
// Never throws on model failure.
PruneResult prune(ModelClient& model, const Query& query, const LifeGraph& graph,
                  const std::vector<Path>& frontier, int k,
                  const std::vector<SearchCandidate>& candidates);

// Model decides whether source data is needed and which media ids to fetch,
// restricted to source_refs present on the retained paths (newest path
// first). Unresolvable ids are skipped with a diagnostic.
std::vector<ResolvedRef> fetch_references(ModelClient& model, const Query& query,
                                          const LifeGraph& graph,
                                          const std::vector<Path>& paths,
                                          const MediaStore* media_store,
                                          std::vector<std::string>* diagnostics = nullptr);

// True iff the model judges the accumulated context sufficient. Model failure
// means false (keep expanding until the depth limit).
bool reasoning_check(ModelClient& model, const Query& query, const LifeGraph& graph,
                     const std::vector<Path>& paths, const std::vector<ResolvedRef>& refs,
                     bool with_refs = true);

RetrievedContext retrieve(const Query& query, const LifeGraph& graph,
                          const RetrievalOptions& options, ModelClient& model,
                          const MediaStore* media_store = nullptr);

// Final model failure carries the retrieved context for inspection.
class AnswerError : public ModelError {
public:
    AnswerError(std::string msg, RetrievedContext context)
        : ModelError(std::move(msg)), context_(std::move(context)) {}
    const RetrievedContext& context() const { return context_; }

private:
    RetrievedContext context_;
};

std::string answer(const Query& query, const LifeGraph& graph, const RetrievalOptions& options,
                   ModelClient& model, const MediaStore* media_store = nullptr,
                   RetrievedContext* out_context = nullptr);

// "label -[relation{k=v}]-> label"; edge attrs inline, discovery order.
std::string render_path(const LifeGraph& graph, const Path& path);

std::string context_to_json(const LifeGraph& graph, const RetrievedContext& context);

}  // namespace lifegraph
