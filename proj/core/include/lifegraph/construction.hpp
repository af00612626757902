#pragma once
// Graph construction from a Vaccount: social-network scaffold first, then
// history integration over greedy bin-packed batches, each batch going
// through a two-turn extract conversation (candidates, then triples).

#include "lifegraph/graph.hpp"
#include "lifegraph/model_client.hpp"
#include "lifegraph/vaccount.hpp"

#include <string>
#include <vector>

namespace lifegraph {

struct ConstructionConfig {
    int image_cost = 256;       // weight per image
    long capacity = 2048;       // max batch weight
    int context_budget = 4000;  // chars of serialized graph passed as context
};

struct ExtractionBatch {
    std::vector<HistoryEvent> events;  // chronologically contiguous
    long weight = 0;
    bool over_capacity = false;  // flagged singleton heavier than capacity
};

struct CandidateEntity {
    std::string label;  // normalized
    EntityKind kind = EntityKind::Object;
};

struct TripleDraft {
    std::string subject_label;
    EntityKind subject_kind = EntityKind::Object;
    std::string relation;
    std::string object_label;
    EntityKind object_kind = EntityKind::Object;
    EdgeAttrs attrs;
    std::vector<std::string> media_ids;  // cited, all within the batch
};

struct ExtractionResult {
    std::vector<CandidateEntity> candidates;
    std::vector<TripleDraft> drafts;
    std::vector<std::string> diagnostics;  // dropped entities/triples, parse trouble
    int emitted_triples = 0;               // before validation
};

// weight = #images * image_cost + ceil(len(description) / 4)
long event_weight(const HistoryEvent& event, int image_cost);

// Greedy first-fit over chronologically sorted events. Flattening the result
// reproduces the input order; every event appears exactly once.
std::vector<ExtractionBatch> pack_batches(const std::vector<HistoryEvent>& history,
                                          const ConstructionConfig& config);

// Compact triple list, most recently inserted first, truncated to budget.
std::string serialize_graph_context(const LifeGraph& graph, int budget);

// Turn 1 requests candidate entities restricted to the six kinds; turn 2
// requests triples anchored to those candidates. Drafts citing unknown
// entities or media outside the batch are rejected with a diagnostic.
ExtractionResult two_turn_extract(const std::string& context, const ExtractionBatch& batch,
                                  ModelClient& model);

// One PersonAnimal node per concept plus model-derived relation edges among
// concepts. Throws ConstructionError if the model emitted triples but every
// one was rejected.
LifeGraph build_scaffold(const Vaccount& account, ModelClient& model);

// Inserts validated triples batch by batch; a failing batch is skipped with
// a diagnostic and the graph stays valid. Every Event node integrated here
// ends up linked to a Date node.
void integrate_history(LifeGraph& graph, const Vaccount& account,
                       const std::vector<ExtractionBatch>& batches, ModelClient& model,
                       const ConstructionConfig& config,
                       std::vector<std::string>* diagnostics = nullptr);

// scaffold + pack_batches + integrate_history
LifeGraph build_graph(const Vaccount& account, ModelClient& model,
                      const ConstructionConfig& config = {},
                      std::vector<std::string>* diagnostics = nullptr);

}  // namespace lifegraph
