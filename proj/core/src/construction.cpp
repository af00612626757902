#include "lifegraph/construction.hpp"

#include "lifegraph/json_util.hpp"
#include "lifegraph/prompts.hpp"
#include "lifegraph/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace lifegraph {

long event_weight(const HistoryEvent& event, int image_cost) {
    long desc = (static_cast<long>(event.description.size()) + 3) / 4;
    return static_cast<long>(event.images.size()) * image_cost + desc;
}

std::vector<ExtractionBatch> pack_batches(const std::vector<HistoryEvent>& history,
                                          const ConstructionConfig& config) {
    std::vector<ExtractionBatch> batches;
    ExtractionBatch current;
    auto flush = [&] {
        if (!current.events.empty()) {
            batches.push_back(std::move(current));
            current = {};
        }
    };
    for (const auto& ev : history) {
        long w = event_weight(ev, config.image_cost);
        if (w > config.capacity) {
            flush();
            ExtractionBatch big;
            big.events.push_back(ev);
            big.weight = w;
            big.over_capacity = true;
            batches.push_back(std::move(big));
            continue;
        }
        if (current.weight + w > config.capacity) flush();
        current.events.push_back(ev);
        current.weight += w;
    }
    flush();
    return batches;
}

std::string serialize_graph_context(const LifeGraph& graph, int budget) {
    std::string out;
    const auto& order = graph.edge_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const HyperEdge* e = graph.edge(*it);
        const Node* s = graph.node(e->subject);
        const Node* o = graph.node(e->object);
        std::string line = s->label + " -" + e->relation;
        if (!e->attrs.empty()) {
            line += "{";
            bool first = true;
            for (const auto& [k, vals] : e->attrs) {
                if (!first) line += ", ";
                first = false;
                line += k + "=";
                for (size_t i = 0; i < vals.size(); ++i) {
                    if (i) line += "|";
                    line += vals[i];
                }
            }
            line += "}";
        }
        line += "-> " + o->label + "\n";
        if (static_cast<int>(out.size() + line.size()) > budget) break;
        out += line;
    }
    return out;
}

namespace {

struct CandidateSet {
    // normalized label -> kind
    std::map<std::string, EntityKind> by_label;
    std::vector<CandidateEntity> ordered;

    bool add(std::string_view label, EntityKind kind) {
        std::string norm = normalize_label(label);
        if (norm.empty()) return false;
        if (by_label.count(norm)) return true;  // keep first kind
        by_label.emplace(norm, kind);
        ordered.push_back({norm, kind});
        return true;
    }
};

// Parses {"entities":[{"label","kind"}]} tolerantly.
void parse_entities(const std::string& text, CandidateSet& out,
                    std::vector<std::string>& diagnostics) {
    auto doc = extract_json_block(text);
    if (!doc || !doc->contains("entities") || !(*doc)["entities"].is_array()) {
        diagnostics.push_back("turn 1: no parseable entity list");
        return;
    }
    for (const auto& e : (*doc)["entities"]) {
        std::string label = e.value("label", "");
        std::string kind_s = e.value("kind", "");
        auto kind = entity_kind_from_string(kind_s);
        if (!kind) {
            diagnostics.push_back("turn 1: rejected entity '" + label + "' with kind '" +
                                  kind_s + "' outside the schema");
            continue;
        }
        if (label.empty() || normalize_label(label).empty()) {
            diagnostics.push_back("turn 1: rejected entity with empty label");
            continue;
        }
        out.add(label, *kind);
    }
}

EdgeAttrs parse_attrs(const nlohmann::json& j) {
    EdgeAttrs attrs;
    if (!j.is_object()) return attrs;
    for (const auto& [k, v] : j.items()) {
        std::vector<std::string> vals;
        if (v.is_array()) {
            for (const auto& x : v) {
                vals.push_back(x.is_string() ? x.get<std::string>() : x.dump());
            }
        } else if (v.is_string()) {
            vals.push_back(v.get<std::string>());
        } else {
            vals.push_back(v.dump());
        }
        attrs.emplace_back(k, std::move(vals));
    }
    return attrs;
}

// Parses {"triples":[...]} and validates against candidates + batch media.
void parse_triples(const std::string& text, const CandidateSet& candidates,
                   const std::set<std::string>& allowed_media, ExtractionResult& result) {
    auto doc = extract_json_block(text);
    if (!doc || !doc->contains("triples") || !(*doc)["triples"].is_array()) {
        result.diagnostics.push_back("turn 2: no parseable triple list");
        return;
    }
    for (const auto& t : (*doc)["triples"]) {
        ++result.emitted_triples;
        TripleDraft draft;
        std::string subj = normalize_label(t.value("subject", ""));
        std::string obj = normalize_label(t.value("object", ""));
        draft.relation = t.value("relation", "");
        auto sk = candidates.by_label.find(subj);
        auto ok = candidates.by_label.find(obj);
        if (sk == candidates.by_label.end() || ok == candidates.by_label.end()) {
            result.diagnostics.push_back("turn 2: rejected triple (" + subj + ", " +
                                         draft.relation + ", " + obj +
                                         "): endpoint not in candidate set");
            continue;
        }
        if (draft.relation.empty()) {
            result.diagnostics.push_back("turn 2: rejected triple with empty relation");
            continue;
        }
        draft.subject_label = subj;
        draft.subject_kind = sk->second;
        draft.object_label = obj;
        draft.object_kind = ok->second;
        draft.attrs = parse_attrs(t.value("attrs", nlohmann::json::object()));
        bool media_ok = true;
        for (const auto& m : t.value("media", std::vector<std::string>{})) {
            if (!allowed_media.count(m)) {
                result.diagnostics.push_back("turn 2: rejected triple citing media '" + m +
                                             "' outside the batch");
                media_ok = false;
                break;
            }
            draft.media_ids.push_back(m);
        }
        if (!media_ok) continue;
        result.drafts.push_back(std::move(draft));
    }
}

std::string render_batch(const ExtractionBatch& batch) {
    std::string out;
    for (const auto& ev : batch.events) {
        out += "[" + ev.date + "] " + ev.description;
        if (!ev.images.empty()) {
            out += " (media:";
            for (const auto& img : ev.images) out += " " + img.media_id;
            out += ")";
        }
        out += "\n";
    }
    return out;
}

constexpr const char* kKindList =
    "PersonAnimal, Event, Date, Location, Activity, Object";

}  // namespace

ExtractionResult two_turn_extract(const std::string& context, const ExtractionBatch& batch,
                                  ModelClient& model) {
    ExtractionResult result;
    CandidateSet candidates;
    std::set<std::string> allowed_media;
    for (const auto& ev : batch.events) {
        for (const auto& img : ev.images) allowed_media.insert(img.media_id);
    }

    std::ostringstream turn1;
    turn1 << prompts::kEntityMarker << " in the following " << prompts::kHistoryMarker
          << ", strictly limited to these kinds: " << kKindList << ".\n"
          << "Reply with a fenced JSON block: {\"entities\": [{\"label\": \"...\", \"kind\": "
             "\"...\"}]}\n\n";
    if (!context.empty()) turn1 << "KNOWN GRAPH:\n" << context << "\n";
    turn1 << "RECORDS:\n" << render_batch(batch);

    Conversation conv;
    conv.push_back({Role::User, turn1.str(), {}});
    ModelResponse r1 = model.complete(conv);
    parse_entities(r1.text, candidates, result.diagnostics);
    result.candidates = candidates.ordered;

    std::ostringstream turn2;
    turn2 << prompts::kTripleMarker
          << " describing the records, using only the candidate entities above.\n"
          << "Reply with a fenced JSON block: {\"triples\": [{\"subject\": \"...\", "
             "\"relation\": \"...\", \"object\": \"...\", \"attrs\": {\"key\": [\"value\"]}, "
             "\"media\": [\"id\"]}]}\n";
    conv.push_back({Role::Assistant, r1.text, {}});
    conv.push_back({Role::User, turn2.str(), {}});
    ModelResponse r2 = model.complete(conv);
    parse_triples(r2.text, candidates, allowed_media, result);
    return result;
}

LifeGraph build_scaffold(const Vaccount& account, ModelClient& model) {
    validate_vaccount(account);
    LifeGraph graph;
    graph.set_owner(account.id);

    std::map<std::string, std::string> concept_node;  // normalized name -> node id
    std::map<std::string, MediaRef> portraits;
    for (const auto& c : account.concepts) {
        NodeAttrs attrs;
        if (!c.persona.empty()) attrs.emplace_back("persona", c.persona);
        if (!c.relation_to_owner.empty()) {
            attrs.emplace_back("relation_to_owner", c.relation_to_owner);
        }
        std::vector<MediaRef> refs;
        if (!c.portrait.media_id.empty()) refs.push_back(c.portrait);
        std::string id = graph.add_node(EntityKind::PersonAnimal, c.name, std::move(attrs), refs);
        concept_node[normalize_label(c.name)] = id;
        portraits[normalize_label(c.name)] = c.portrait;
    }

    std::ostringstream turn1;
    turn1 << prompts::kEntityMarker << " for the " << prompts::kScaffoldMarker
          << " below, strictly limited to these kinds: " << kKindList << ".\n"
          << "Reply with a fenced JSON block: {\"entities\": [{\"label\": \"...\", \"kind\": "
             "\"...\"}]}\n\nCONCEPTS:\n";
    for (const auto& c : account.concepts) {
        turn1 << "- " << c.name << " (" << c.relation_to_owner << "): " << c.persona << "\n";
    }

    Conversation conv;
    conv.push_back({Role::User, turn1.str(), {}});
    ModelResponse r1 = model.complete(conv);

    std::vector<std::string> diagnostics;
    CandidateSet candidates;
    parse_entities(r1.text, candidates, diagnostics);
    // Scaffold candidates are restricted to the account's concepts.
    CandidateSet filtered;
    for (const auto& c : candidates.ordered) {
        if (c.kind == EntityKind::PersonAnimal && concept_node.count(c.label)) {
            filtered.add(c.label, c.kind);
        } else {
            diagnostics.push_back("scaffold: dropped candidate '" + c.label +
                                  "' not matching a concept");
        }
    }

    std::ostringstream turn2;
    turn2 << prompts::kTripleMarker
          << " among the concepts above (their relationships), using only the candidate "
             "entities.\nReply with a fenced JSON block: {\"triples\": [{\"subject\": \"...\", "
             "\"relation\": \"...\", \"object\": \"...\", \"attrs\": {}}]}\n";
    conv.push_back({Role::Assistant, r1.text, {}});
    conv.push_back({Role::User, turn2.str(), {}});
    ModelResponse r2 = model.complete(conv);

    ExtractionResult triples;
    std::set<std::string> portrait_media;
    for (const auto& [name, ref] : portraits) {
        if (!ref.media_id.empty()) portrait_media.insert(ref.media_id);
    }
    parse_triples(r2.text, filtered, portrait_media, triples);

    int inserted = 0;
    for (const auto& draft : triples.drafts) {
        std::vector<MediaRef> refs;
        for (const auto& label : {draft.subject_label, draft.object_label}) {
            auto it = portraits.find(label);
            if (it != portraits.end() && !it->second.media_id.empty()) refs.push_back(it->second);
        }
        graph.add_edge(concept_node.at(draft.subject_label), draft.relation,
                       concept_node.at(draft.object_label), draft.attrs, refs);
        ++inserted;
    }
    if (triples.emitted_triples > 0 && inserted == 0) {
        throw ConstructionError("scaffold: model emitted " +
                                std::to_string(triples.emitted_triples) +
                                " triples but all were rejected");
    }
    return graph;
}

void integrate_history(LifeGraph& graph, const Vaccount& account,
                       const std::vector<ExtractionBatch>& batches, ModelClient& model,
                       const ConstructionConfig& config,
                       std::vector<std::string>* diagnostics) {
    auto note = [&](std::string msg) {
        if (diagnostics) diagnostics->push_back(std::move(msg));
    };
    (void)account;
    for (size_t bi = 0; bi < batches.size(); ++bi) {
        const ExtractionBatch& batch = batches[bi];
        if (batch.events.empty()) continue;
        std::string context = serialize_graph_context(graph, config.context_budget);
        ExtractionResult result;
        try {
            result = two_turn_extract(context, batch, model);
        } catch (const ModelError& e) {
            note("batch " + std::to_string(bi) + " skipped: " + e.what());
            continue;
        }
        for (auto& d : result.diagnostics) {
            note("batch " + std::to_string(bi) + ": " + std::move(d));
        }

        // media id -> event date, and the default provenance for uncited drafts
        std::map<std::string, std::string> media_date;
        std::vector<MediaRef> batch_media;
        for (const auto& ev : batch.events) {
            for (const auto& img : ev.images) {
                media_date[img.media_id] = ev.date;
                batch_media.push_back(img);
            }
        }

        std::vector<std::string> batch_event_nodes;
        for (const auto& draft : result.drafts) {
            std::vector<MediaRef> refs;
            for (const auto& m : draft.media_ids) refs.push_back({m, media_date.at(m)});
            if (refs.empty()) refs = batch_media;

            std::string subj = graph.add_node(draft.subject_kind, draft.subject_label, {}, refs);
            std::string obj = graph.add_node(draft.object_kind, draft.object_label, {}, refs);
            graph.add_edge(subj, draft.relation, obj, draft.attrs, refs);
            if (draft.subject_kind == EntityKind::Event) batch_event_nodes.push_back(subj);
            if (draft.object_kind == EntityKind::Event) batch_event_nodes.push_back(obj);
        }

        // Every Event node from this batch must link to a Date node.
        std::sort(batch_event_nodes.begin(), batch_event_nodes.end());
        batch_event_nodes.erase(std::unique(batch_event_nodes.begin(), batch_event_nodes.end()),
                                batch_event_nodes.end());
        for (const auto& ev_id : batch_event_nodes) {
            bool has_date = false;
            for (const auto& nb : graph.neighbors(ev_id)) {
                if (graph.node(nb.node_id)->kind == EntityKind::Date) {
                    has_date = true;
                    break;
                }
            }
            if (has_date) continue;
            const Node* ev_node = graph.node(ev_id);
            std::string date = batch.events.front().date;
            for (const auto& r : ev_node->source_refs) {
                if (!r.date.empty()) {
                    date = r.date;
                    break;
                }
            }
            std::vector<MediaRef> refs = ev_node->source_refs;
            std::string date_id = graph.add_node(EntityKind::Date, date, {}, refs);
            graph.add_edge(ev_id, "occurredOn", date_id, {}, refs);
        }
    }
}

LifeGraph build_graph(const Vaccount& account, ModelClient& model,
                      const ConstructionConfig& config, std::vector<std::string>* diagnostics) {
    LifeGraph graph = build_scaffold(account, model);
    auto batches = pack_batches(account.history, config);
    if (diagnostics) {
        for (size_t i = 0; i < batches.size(); ++i) {
            if (batches[i].over_capacity) {
                diagnostics->push_back("batch " + std::to_string(i) +
                                       " exceeds capacity (singleton), weight " +
                                       std::to_string(batches[i].weight));
            }
        }
    }
    integrate_history(graph, account, batches, model, config, diagnostics);
    return graph;
}

}  // namespace lifegraph
