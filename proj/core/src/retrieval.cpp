#include "lifegraph/retrieval.hpp"

#include "lifegraph/json_util.hpp"
#include "lifegraph/prompts.hpp"
#include "lifegraph/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace lifegraph {

using ordered_json = nlohmann::ordered_json;

double lexical_score(const Node& node, const std::set<std::string>& query_tokens) {
    double score = 0.0;
    for (const auto& tok : tokenize(node.label)) {
        if (query_tokens.count(tok)) score += 2.0;
    }
    for (const auto& [k, v] : node.attrs) {
        for (const auto& tok : tokenize(v)) {
            if (query_tokens.count(tok)) score += 1.0;
        }
    }
    return score;
}

std::string render_path(const LifeGraph& graph, const Path& path) {
    std::string out;
    for (size_t i = 0; i < path.nodes.size(); ++i) {
        const Node* n = graph.node(path.nodes[i]);
        if (i > 0) {
            const HyperEdge* e = graph.edge(path.edges[i - 1]);
            out += " -[" + e->relation;
            if (!e->attrs.empty()) {
                out += "{";
                bool first = true;
                for (const auto& [k, vals] : e->attrs) {
                    if (!first) out += ", ";
                    first = false;
                    out += k + "=";
                    for (size_t j = 0; j < vals.size(); ++j) {
                        if (j) out += "|";
                        out += vals[j];
                    }
                }
                out += "}";
            }
            out += "]-> ";
        }
        out += std::string(to_string(n->kind)) + ":" + n->label;
    }
    return out;
}

namespace {

std::string render_paths(const LifeGraph& graph, const std::vector<Path>& paths) {
    std::string out;
    for (const auto& p : paths) out += "- " + render_path(graph, p) + "\n";
    return out;
}

}  // namespace

std::vector<std::string> top_entities(const Query& query, const LifeGraph& graph, int k,
                                      ModelClient& model, bool lexical_only) {
    if (graph.node_count() == 0) throw GraphError("top_entities: empty graph");
    if (query.text.empty()) throw GraphError("top_entities: empty query");

    auto qtokens = tokenize(query.text);
    struct Scored {
        std::string id;
        double score;
    };
    std::vector<Scored> scored;
    scored.reserve(graph.node_count());
    for (const auto& id : graph.node_order()) {
        scored.push_back({id, lexical_score(*graph.node(id), qtokens)});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });

    auto take = [&](size_t n) {
        std::vector<std::string> out;
        for (size_t i = 0; i < scored.size() && i < n; ++i) out.push_back(scored[i].id);
        return out;
    };
    if (lexical_only) return take(static_cast<size_t>(k));

    auto shortlist = take(static_cast<size_t>(3 * k));
    std::ostringstream prompt;
    prompt << prompts::kTopEntitiesMarker << " for the question below. Pick at most " << k
           << " entity ids.\nReply with a fenced JSON block: {\"selected\": [\"id\"]}\n\n"
           << "QUESTION: " << query.text << "\n\nENTITIES:\n";
    for (const auto& id : shortlist) {
        const Node* n = graph.node(id);
        prompt << "- id=" << id << " " << to_string(n->kind) << ":" << n->label << "\n";
    }
    Conversation conv;
    conv.push_back({Role::User, prompt.str(), query.media});

    std::vector<std::string> selected;
    try {
        ModelResponse r = model.complete(conv);
        auto doc = extract_json_block(r.text);
        if (doc && doc->contains("selected") && (*doc)["selected"].is_array()) {
            std::set<std::string> allowed(shortlist.begin(), shortlist.end());
            for (const auto& s : (*doc)["selected"]) {
                if (!s.is_string()) continue;
                std::string id = s.get<std::string>();
                // ids outside the candidate list are ignored
                if (!allowed.count(id)) continue;
                if (std::find(selected.begin(), selected.end(), id) != selected.end()) continue;
                selected.push_back(id);
                if (selected.size() == static_cast<size_t>(k)) break;
            }
        }
    } catch (const ModelError&) {
        selected.clear();
    }
    if (selected.empty()) return take(static_cast<size_t>(k));
    return selected;
}

std::vector<SearchCandidate> search_candidates(const LifeGraph& graph,
                                               const std::vector<Path>& frontier) {
    std::vector<SearchCandidate> out;
    for (size_t pi = 0; pi < frontier.size(); ++pi) {
        const Path& path = frontier[pi];
        for (const auto& nb : graph.neighbors(path.terminal())) {
            if (path.contains(nb.node_id)) continue;  // simple paths only
            out.push_back({pi, nb.edge_id, nb.node_id});
        }
    }
    return out;
}

PruneResult prune(ModelClient& model, const Query& query, const LifeGraph& graph,
                  const std::vector<Path>& frontier, int k,
                  const std::vector<SearchCandidate>& candidates) {
    if (candidates.empty()) throw GraphError("prune: empty candidate set");

    std::ostringstream prompt;
    prompt << prompts::kPruneMarker
           << " with a relevance score in [0,1] for the question.\nReply with a fenced JSON "
              "block: {\"scores\": {\"1\": 0.5}}\n\nQUESTION: "
           << query.text << "\n\nPATHS SO FAR:\n"
           << render_paths(graph, frontier) << "\nCANDIDATES:\n";
    for (size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        const HyperEdge* e = graph.edge(c.edge_id);
        const Node* n = graph.node(c.node_id);
        prompt << "CANDIDATE " << (i + 1) << ": " << render_path(graph, frontier[c.path_index])
               << " -[" << e->relation << "]-> " << to_string(n->kind) << ":" << n->label
               << " (node=" << c.node_id << ", edge=" << c.edge_id << ")\n";
    }
    Conversation conv;
    conv.push_back({Role::User, prompt.str(), {}});

    std::vector<double> scores(candidates.size(), 0.5);
    try {
        ModelResponse r = model.complete(conv);
        auto doc = extract_json_block(r.text);
        if (doc && doc->contains("scores")) {
            const auto& s = (*doc)["scores"];
            if (s.is_object()) {
                for (const auto& [key, v] : s.items()) {
                    size_t idx = 0;
                    try {
                        idx = static_cast<size_t>(std::stoul(key));
                    } catch (...) {
                        continue;
                    }
                    if (idx >= 1 && idx <= candidates.size() && v.is_number()) {
                        scores[idx - 1] = std::clamp(v.get<double>(), 0.0, 1.0);
                    }
                }
            } else if (s.is_array()) {
                for (size_t i = 0; i < s.size() && i < candidates.size(); ++i) {
                    if (s[i].is_number()) scores[i] = std::clamp(s[i].get<double>(), 0.0, 1.0);
                }
            }
        }
    } catch (const ModelError&) {
        // fallback: uniform 0.5, tie-break decides
    }

    std::vector<size_t> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        if (candidates[a].node_id != candidates[b].node_id) {
            return candidates[a].node_id < candidates[b].node_id;
        }
        if (candidates[a].edge_id != candidates[b].edge_id) {
            return candidates[a].edge_id < candidates[b].edge_id;
        }
        return candidates[a].path_index < candidates[b].path_index;
    });

    PruneResult result;
    for (size_t r = 0; r < order.size(); ++r) {
        result.scores.push_back({order[r], scores[order[r]], static_cast<int>(r + 1)});
        if (r < static_cast<size_t>(k)) result.retained.push_back(order[r]);
    }
    return result;
}

namespace {

// Ordered media ids citable from the retained paths, newest path first.
std::vector<MediaRef> allowed_media(const LifeGraph& graph, const std::vector<Path>& paths) {
    std::vector<MediaRef> out;
    std::set<std::string> seen;
    for (auto pit = paths.rbegin(); pit != paths.rend(); ++pit) {
        auto add_refs = [&](const std::vector<MediaRef>& refs) {
            for (const auto& r : refs) {
                if (seen.insert(r.media_id).second) out.push_back(r);
            }
        };
        for (size_t i = 0; i < pit->nodes.size(); ++i) {
            add_refs(graph.node(pit->nodes[i])->source_refs);
            if (i > 0) add_refs(graph.edge(pit->edges[i - 1])->source_refs);
        }
    }
    return out;
}

std::string render_refs(const std::vector<ResolvedRef>& refs) {
    std::string out;
    for (const auto& r : refs) {
        out += "- " + r.media_id;
        if (!r.date.empty()) out += " (" + r.date + ")";
        if (r.payload && r.payload->mime == "text/plain") out += ": " + r.payload->bytes;
        out += "\n";
    }
    return out;
}

}  // namespace

std::vector<ResolvedRef> fetch_references(ModelClient& model, const Query& query,
                                          const LifeGraph& graph,
                                          const std::vector<Path>& paths,
                                          const MediaStore* media_store,
                                          std::vector<std::string>* diagnostics) {
    auto allowed = allowed_media(graph, paths);
    if (allowed.empty()) return {};

    std::ostringstream prompt;
    prompt << prompts::kFetchRefsMarker
           << " to answer the question, and if so which media ids (only from the list "
              "below).\nReply with a fenced JSON block: {\"need_refs\": true, \"media\": "
              "[\"id\"]}\n\nQUESTION: "
           << query.text << "\n\nPATHS:\n"
           << render_paths(graph, paths) << "\nAVAILABLE MEDIA:\n";
    for (const auto& m : allowed) {
        prompt << "- " << m.media_id;
        if (!m.date.empty()) prompt << " (" << m.date << ")";
        prompt << "\n";
    }
    Conversation conv;
    conv.push_back({Role::User, prompt.str(), {}});

    std::set<std::string> requested;
    try {
        ModelResponse r = model.complete(conv);
        auto doc = extract_json_block(r.text);
        if (doc && doc->value("need_refs", false)) {
            for (const auto& m : doc->value("media", std::vector<std::string>{})) {
                requested.insert(m);
            }
        }
    } catch (const ModelError& e) {
        if (diagnostics) diagnostics->push_back(std::string("fetch_references: ") + e.what());
        return {};
    }

    std::vector<ResolvedRef> out;
    for (const auto& m : allowed) {  // requests outside the allowed set are ignored
        if (!requested.count(m.media_id)) continue;
        ResolvedRef ref;
        ref.media_id = m.media_id;
        ref.date = m.date;
        if (media_store) ref.payload = media_store->resolve(m.media_id);
        if (!ref.payload) {
            if (diagnostics) {
                diagnostics->push_back("fetch_references: unresolvable media '" + m.media_id +
                                       "', skipped");
            }
            continue;
        }
        out.push_back(std::move(ref));
    }
    return out;
}

bool reasoning_check(ModelClient& model, const Query& query, const LifeGraph& graph,
                     const std::vector<Path>& paths, const std::vector<ResolvedRef>& refs,
                     bool with_refs) {
    std::ostringstream prompt;
    prompt << prompts::kReasoningMarker << " to answer the question? Reply with the single "
           << "token SUFFICIENT or INSUFFICIENT.\n\nQUESTION: " << query.text << "\n\nPATHS:\n"
           << render_paths(graph, paths);
    if (!refs.empty()) prompt << "\nREFS:\n" << render_refs(refs);

    Conversation conv;
    ChatTurn turn{Role::User, prompt.str(), {}};
    if (with_refs) {
        for (const auto& r : refs) {
            if (r.payload) turn.media.push_back(*r.payload);
        }
    }
    conv.push_back(std::move(turn));
    try {
        ModelResponse r = model.complete(conv);
        // token match; "SUFFICIENT" inside "INSUFFICIENT" must not count
        std::istringstream words(r.text);
        std::string w;
        while (words >> w) {
            while (!w.empty() && !std::isalnum(static_cast<unsigned char>(w.back()))) w.pop_back();
            if (w == "SUFFICIENT") return true;
            if (w == "INSUFFICIENT") return false;
        }
        return false;
    } catch (const ModelError&) {
        return false;
    }
}

RetrievedContext retrieve(const Query& query, const LifeGraph& graph,
                          const RetrievalOptions& options, ModelClient& model,
                          const MediaStore* media_store) {
    if (options.depth < 1 || options.width < 1) {
        throw GraphError("retrieve: depth and width must be >= 1");
    }
    RetrievedContext ctx;
    auto seeds =
        top_entities(query, graph, options.width, model, options.lexical_only);

    std::vector<Path> frontier;
    for (const auto& id : seeds) {
        Path p;
        p.nodes.push_back(id);
        frontier.push_back(std::move(p));
    }
    ctx.paths = frontier;

    std::set<std::string> fetched;
    for (int depth = 1; depth <= options.depth; ++depth) {
        ctx.effective_depth = depth;
        auto candidates = search_candidates(graph, frontier);
        if (candidates.empty()) break;

        auto pruned = prune(model, query, graph, frontier, options.width, candidates);
        std::vector<Path> next;
        for (size_t idx : pruned.retained) {
            const auto& c = candidates[idx];
            Path p = frontier[c.path_index];
            p.edges.push_back(c.edge_id);
            p.nodes.push_back(c.node_id);
            ctx.paths.push_back(p);
            next.push_back(std::move(p));
        }
        frontier = std::move(next);

        if (options.with_refs) {
            auto refs = fetch_references(model, query, graph, ctx.paths, media_store,
                                         &ctx.diagnostics);
            // accumulate across iterations, capped at max_refs
            for (auto& r : refs) {
                if (static_cast<int>(ctx.refs.size()) >= options.max_refs) break;
                if (fetched.insert(r.media_id).second) ctx.refs.push_back(std::move(r));
            }
        }
        if (reasoning_check(model, query, graph, ctx.paths, ctx.refs, options.with_refs)) {
            break;
        }
    }
    return ctx;
}

std::string answer(const Query& query, const LifeGraph& graph, const RetrievalOptions& options,
                   ModelClient& model, const MediaStore* media_store,
                   RetrievedContext* out_context) {
    RetrievedContext ctx = retrieve(query, graph, options, model, media_store);
    if (out_context) *out_context = ctx;

    std::ostringstream prompt;
    prompt << prompts::kAnswerMarker << " using the retrieved personal context.\n\nQUESTION: "
           << query.text << "\n\nPATHS:\n"
           << render_paths(graph, ctx.paths);
    if (options.with_refs && !ctx.refs.empty()) prompt << "\nREFS:\n" << render_refs(ctx.refs);

    ChatTurn turn{Role::User, prompt.str(), query.media};
    if (options.with_refs) {
        for (const auto& r : ctx.refs) {
            if (r.payload) turn.media.push_back(*r.payload);
        }
    }
    Conversation conv;
    conv.push_back(std::move(turn));
    try {
        return model.complete(conv).text;
    } catch (const ModelError& e) {
        throw AnswerError(std::string("answer: final generation failed: ") + e.what(),
                          std::move(ctx));
    }
}

std::string context_to_json(const LifeGraph& graph, const RetrievedContext& context) {
    ordered_json doc;
    auto paths = ordered_json::array();
    for (const auto& p : context.paths) {
        ordered_json po;
        po["nodes"] = p.nodes;
        po["edges"] = p.edges;
        po["rendered"] = render_path(graph, p);
        paths.push_back(std::move(po));
    }
    doc["paths"] = std::move(paths);
    auto refs = ordered_json::array();
    for (const auto& r : context.refs) {
        ordered_json ro;
        ro["media_id"] = r.media_id;
        if (!r.date.empty()) ro["date"] = r.date;
        ro["resolved"] = r.payload.has_value();
        if (r.payload) ro["bytes"] = r.payload->bytes.size();
        refs.push_back(std::move(ro));
    }
    doc["refs"] = std::move(refs);
    doc["effective_depth"] = context.effective_depth;
    return doc.dump(2);
}

}  // namespace lifegraph
