#include "lifegraph/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lifegraph {

using ordered_json = nlohmann::ordered_json;

namespace {

const char* kKindNames[] = {"PersonAnimal", "Event", "Date", "Location", "Activity", "Object"};

std::string dot_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

const char* to_string(EntityKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<EntityKind> entity_kind_from_string(std::string_view s) {
    for (int i = 0; i < 6; ++i) {
        if (s == kKindNames[i]) return static_cast<EntityKind>(i);
    }
    return std::nullopt;
}

std::string node_id_for(EntityKind kind, std::string_view normalized_label) {
    uint64_t h = fnv1a64(to_string(kind));
    h = fnv1a64("\x1f", h);
    h = fnv1a64(normalized_label, h);
    return "n" + hex64(h);
}

std::string edge_id_for(const std::string& subject_id, std::string_view relation,
                        const std::string& object_id, const EdgeAttrs& attrs) {
    // Attrs enter the identity with keys sorted; value order is preserved.
    EdgeAttrs canon = attrs;
    std::sort(canon.begin(), canon.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    uint64_t h = fnv1a64(subject_id);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(relation, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(object_id, h);
    for (const auto& [k, vals] : canon) {
        h = fnv1a64("\x1e", h);
        h = fnv1a64(k, h);
        for (const auto& v : vals) {
            h = fnv1a64("\x1f", h);
            h = fnv1a64(v, h);
        }
    }
    return "e" + hex64(h);
}

void merge_refs(std::vector<MediaRef>& into, const std::vector<MediaRef>& from) {
    into.insert(into.end(), from.begin(), from.end());
    std::sort(into.begin(), into.end());
    into.erase(std::unique(into.begin(), into.end()), into.end());
}

std::string LifeGraph::add_node(EntityKind kind, std::string_view label, NodeAttrs attrs,
                                std::vector<MediaRef> source_refs) {
    std::string norm = normalize_label(label);
    if (norm.empty()) {
        throw GraphError("add_node: label is empty after normalization: '" + std::string(label) +
                         "'");
    }
    std::string key = std::string(to_string(kind)) + "\x1f" + norm;
    auto it = label_index_.find(key);
    if (it != label_index_.end()) {
        Node& existing = nodes_.at(it->second);
        // first-writer wins per key
        for (auto& [k, v] : attrs) {
            bool present = std::any_of(existing.attrs.begin(), existing.attrs.end(),
                                       [&](const auto& kv) { return kv.first == k; });
            if (!present) existing.attrs.emplace_back(k, std::move(v));
        }
        merge_refs(existing.source_refs, source_refs);
        return it->second;
    }
    Node n;
    n.id = node_id_for(kind, norm);
    n.kind = kind;
    n.label = norm;
    n.attrs = std::move(attrs);
    n.source_refs = std::move(source_refs);
    std::sort(n.source_refs.begin(), n.source_refs.end());
    n.source_refs.erase(std::unique(n.source_refs.begin(), n.source_refs.end()),
                        n.source_refs.end());
    label_index_.emplace(std::move(key), n.id);
    node_order_.push_back(n.id);
    adjacency_.try_emplace(n.id);
    std::string id = n.id;
    nodes_.emplace(id, std::move(n));
    return id;
}

std::string LifeGraph::add_edge(const std::string& subject_id, std::string_view relation,
                                const std::string& object_id, EdgeAttrs attrs,
                                std::vector<MediaRef> source_refs) {
    if (!has_node(subject_id)) {
        throw GraphError("add_edge: missing subject node '" + subject_id + "'");
    }
    if (!has_node(object_id)) {
        throw GraphError("add_edge: missing object node '" + object_id + "'");
    }
    if (relation.empty()) throw GraphError("add_edge: empty relation");
    for (const auto& [k, vals] : attrs) {
        for (const auto& v : vals) {
            if (!v.empty() && v[0] == '@' && !has_node(v.substr(1))) {
                throw GraphError("add_edge: attr '" + k + "' references missing node '" +
                                 v.substr(1) + "'");
            }
        }
    }
    std::string id = edge_id_for(subject_id, relation, object_id, attrs);
    auto it = edges_.find(id);
    if (it != edges_.end()) {
        merge_refs(it->second.source_refs, source_refs);
        return id;
    }
    HyperEdge e;
    e.id = id;
    e.subject = subject_id;
    e.relation = std::string(relation);
    e.object = object_id;
    e.attrs = std::move(attrs);
    e.source_refs = std::move(source_refs);
    std::sort(e.source_refs.begin(), e.source_refs.end());
    e.source_refs.erase(std::unique(e.source_refs.begin(), e.source_refs.end()),
                        e.source_refs.end());
    edge_order_.push_back(id);
    adjacency_[subject_id].push_back(id);
    if (object_id != subject_id) adjacency_[object_id].push_back(id);
    edges_.emplace(id, std::move(e));
    return id;
}

std::vector<Neighbor> LifeGraph::neighbors(const std::string& node_id) const {
    auto it = adjacency_.find(node_id);
    if (it == adjacency_.end()) {
        throw GraphError("neighbors: unknown node '" + node_id + "'");
    }
    std::vector<Neighbor> out;
    out.reserve(it->second.size());
    for (const auto& eid : it->second) {
        const HyperEdge& e = edges_.at(eid);
        if (e.subject == node_id) {
            out.push_back({eid, e.object, Direction::Outgoing});
        }
        if (e.object == node_id && e.subject != node_id) {
            out.push_back({eid, e.subject, Direction::Incoming});
        }
    }
    return out;
}

const Node* LifeGraph::node(const std::string& id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
}

const HyperEdge* LifeGraph::edge(const std::string& id) const {
    auto it = edges_.find(id);
    return it == edges_.end() ? nullptr : &it->second;
}

std::optional<std::string> LifeGraph::find_node(EntityKind kind, std::string_view label) const {
    std::string key = std::string(to_string(kind)) + "\x1f" + normalize_label(label);
    auto it = label_index_.find(key);
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
}

namespace {

ordered_json refs_to_json(const std::vector<MediaRef>& refs) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : refs) {
        ordered_json o;
        o["media_id"] = r.media_id;
        if (!r.date.empty()) o["date"] = r.date;
        arr.push_back(std::move(o));
    }
    return arr;
}

std::vector<MediaRef> refs_from_json(const ordered_json& arr) {
    std::vector<MediaRef> refs;
    for (const auto& o : arr) {
        MediaRef r;
        r.media_id = o.at("media_id").get<std::string>();
        if (o.contains("date")) r.date = o.at("date").get<std::string>();
        refs.push_back(std::move(r));
    }
    return refs;
}

}  // namespace

void LifeGraph::persist(std::ostream& sink) const {
    if (!owner_.empty()) {
        ordered_json meta;
        meta["type"] = "meta";
        meta["owner"] = owner_;
        sink << meta.dump() << '\n';
    }
    for (const auto& id : node_order_) {
        const Node& n = nodes_.at(id);
        ordered_json o;
        o["type"] = "node";
        o["id"] = n.id;
        o["kind"] = to_string(n.kind);
        o["label"] = n.label;
        ordered_json attrs = ordered_json::object();
        for (const auto& [k, v] : n.attrs) attrs[k] = v;
        o["attrs"] = std::move(attrs);
        o["source_refs"] = refs_to_json(n.source_refs);
        sink << o.dump() << '\n';
    }
    for (const auto& id : edge_order_) {
        const HyperEdge& e = edges_.at(id);
        ordered_json o;
        o["type"] = "edge";
        o["id"] = e.id;
        o["subject"] = e.subject;
        o["relation"] = e.relation;
        o["object"] = e.object;
        ordered_json attrs = ordered_json::object();
        for (const auto& [k, vals] : e.attrs) attrs[k] = vals;
        o["attrs"] = std::move(attrs);
        o["source_refs"] = refs_to_json(e.source_refs);
        sink << o.dump() << '\n';
    }
    if (!sink) throw LoadError("persist: write failure");
}

LifeGraph LifeGraph::load(std::istream& source) {
    struct EdgeRec {
        long line;
        std::string subject, relation, object;
        EdgeAttrs attrs;
        std::vector<MediaRef> refs;
    };
    // Two-pass: records may appear in any order (edges before their nodes).
    LifeGraph g;
    std::vector<EdgeRec> pending_edges;
    std::unordered_map<std::string, std::string> file_to_actual;  // stored node id -> rebuilt id
    std::string line;
    long lineno = 0;
    while (std::getline(source, line)) {
        ++lineno;
        if (line.empty()) continue;
        ordered_json o;
        try {
            o = ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw LoadError(std::string("malformed JSON: ") + e.what(), lineno);
        }
        try {
            std::string type = o.at("type").get<std::string>();
            if (type == "meta") {
                g.set_owner(o.value("owner", ""));
            } else if (type == "node") {
                auto kind = entity_kind_from_string(o.at("kind").get<std::string>());
                if (!kind) throw LoadError("unknown entity kind", lineno);
                NodeAttrs attrs;
                for (const auto& [k, v] : o.at("attrs").items()) {
                    attrs.emplace_back(k, v.get<std::string>());
                }
                std::string id = g.add_node(*kind, o.at("label").get<std::string>(),
                                            std::move(attrs),
                                            refs_from_json(o.at("source_refs")));
                file_to_actual[o.at("id").get<std::string>()] = id;
            } else if (type == "edge") {
                EdgeRec rec;
                rec.line = lineno;
                rec.subject = o.at("subject").get<std::string>();
                rec.relation = o.at("relation").get<std::string>();
                rec.object = o.at("object").get<std::string>();
                for (const auto& [k, v] : o.at("attrs").items()) {
                    rec.attrs.emplace_back(k, v.get<std::vector<std::string>>());
                }
                rec.refs = refs_from_json(o.at("source_refs"));
                pending_edges.push_back(std::move(rec));
            } else {
                throw LoadError("unknown record type '" + type + "'", lineno);
            }
        } catch (const LoadError&) {
            throw;
        } catch (const std::exception& e) {
            throw LoadError(std::string("bad record: ") + e.what(), lineno);
        }
    }
    for (auto& rec : pending_edges) {
        auto resolve = [&](const std::string& fid) -> std::string {
            auto it = file_to_actual.find(fid);
            return it == file_to_actual.end() ? fid : it->second;
        };
        try {
            g.add_edge(resolve(rec.subject), rec.relation, resolve(rec.object),
                       std::move(rec.attrs), std::move(rec.refs));
        } catch (const GraphError& e) {
            throw LoadError(std::string("referential violation: ") + e.what(), rec.line);
        }
    }
    return g;
}

void LifeGraph::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot open for writing: " + path);
    persist(out);
}

LifeGraph LifeGraph::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open: " + path);
    return load(in);
}

void LifeGraph::export_dot(std::ostream& sink) const {
    sink << "digraph lifegraph {\n";
    for (const auto& id : node_order_) {
        const Node& n = nodes_.at(id);
        sink << "  \"" << dot_escape(n.id) << "\" [label=\""
             << dot_escape(std::string(to_string(n.kind)) + ":" + n.label) << "\"];\n";
    }
    for (const auto& id : edge_order_) {
        const HyperEdge& e = edges_.at(id);
        std::string label = e.relation;
        if (!e.attrs.empty()) {
            label += "{";
            bool first = true;
            for (const auto& [k, vals] : e.attrs) {
                if (!first) label += ", ";
                first = false;
                label += k + "=";
                for (size_t i = 0; i < vals.size(); ++i) {
                    if (i) label += "|";
                    label += vals[i];
                }
            }
            label += "}";
        }
        sink << "  \"" << dot_escape(e.subject) << "\" -> \"" << dot_escape(e.object)
             << "\" [label=\"" << dot_escape(label) << "\"];\n";
    }
    sink << "}\n";
    if (!sink) throw LoadError("export_dot: write failure");
}

bool LifeGraph::structurally_equal(const LifeGraph& other) const {
    return owner_ == other.owner_ && nodes_ == other.nodes_ && edges_ == other.edges_;
}

void LifeGraph::check_integrity() const {
    std::unordered_map<std::string, int> seen_labels;
    for (const auto& [id, n] : nodes_) {
        if (n.label.empty()) throw GraphError("integrity: empty label on " + id);
        std::string key = std::string(to_string(n.kind)) + "\x1f" + n.label;
        if (++seen_labels[key] > 1) {
            throw GraphError("integrity: duplicate (kind,label) " + key);
        }
    }
    for (const auto& [id, e] : edges_) {
        if (!has_node(e.subject) || !has_node(e.object)) {
            throw GraphError("integrity: dangling endpoint on edge " + id);
        }
        if (e.relation.empty()) throw GraphError("integrity: empty relation on edge " + id);
        for (const auto& [k, vals] : e.attrs) {
            for (const auto& v : vals) {
                if (!v.empty() && v[0] == '@' && !has_node(v.substr(1))) {
                    throw GraphError("integrity: dangling attr ref on edge " + id);
                }
            }
        }
    }
}

}  // namespace lifegraph
