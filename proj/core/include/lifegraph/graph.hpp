#pragma once
// Directed property-graph store: six-kind node schema, hyper-edges with
// auxiliary attributes, source indexing, JSONL persistence and DOT export.
//
// Storage is directed; the undirected view lives in the retrieval layer
// (neighbors() reports both directions).

#include "lifegraph/errors.hpp"
#include "lifegraph/text.hpp"

#include <compare>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lifegraph {

// Closed schema: exactly six entity kinds.
enum class EntityKind { PersonAnimal, Event, Date, Location, Activity, Object };

const char* to_string(EntityKind k);
std::optional<EntityKind> entity_kind_from_string(std::string_view s);

// Pointer into the owning Vaccount's media store (image or text record).
struct MediaRef {
    std::string media_id;
    std::string date;  // ISO-8601 or empty

    auto operator<=>(const MediaRef&) const = default;
};

using NodeAttrs = std::vector<std::pair<std::string, std::string>>;
using EdgeAttrs = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct Node {
    std::string id;
    EntityKind kind = EntityKind::Object;
    std::string label;  // normalized
    NodeAttrs attrs;
    std::vector<MediaRef> source_refs;  // sorted, unique

    bool operator==(const Node&) const = default;
};

// Binary relation plus auxiliary n-ary participants/qualifiers in attrs.
// Attr values prefixed with '@' are node-id references and must resolve.
struct HyperEdge {
    std::string id;
    std::string subject;
    std::string relation;
    std::string object;
    EdgeAttrs attrs;
    std::vector<MediaRef> source_refs;

    bool operator==(const HyperEdge&) const = default;
};

enum class Direction { Outgoing, Incoming };

struct Neighbor {
    std::string edge_id;
    std::string node_id;
    Direction direction;
};

class LifeGraph {
public:
    LifeGraph() = default;

    const std::string& owner() const { return owner_; }
    void set_owner(std::string owner) { owner_ = std::move(owner); }

    // Inserts or merges (dedup on (kind, normalized label)). On merge, attrs
    // follow first-writer-wins per key and source_refs are unioned.
    std::string add_node(EntityKind kind, std::string_view label, NodeAttrs attrs = {},
                         std::vector<MediaRef> source_refs = {});

    // Stores a directed edge. A duplicate (subject, relation, object) with
    // identical attrs merges (source_refs unioned). Dangling endpoints throw.
    std::string add_edge(const std::string& subject_id, std::string_view relation,
                         const std::string& object_id, EdgeAttrs attrs = {},
                         std::vector<MediaRef> source_refs = {});

    // Undirected adjacency: edges where the node is subject or object.
    std::vector<Neighbor> neighbors(const std::string& node_id) const;

    const Node* node(const std::string& id) const;
    const HyperEdge* edge(const std::string& id) const;
    bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
    std::optional<std::string> find_node(EntityKind kind, std::string_view label) const;

    size_t node_count() const { return nodes_.size(); }
    size_t edge_count() const { return edges_.size(); }

    // Insertion-ordered views; iteration over these is deterministic.
    const std::vector<std::string>& node_order() const { return node_order_; }
    const std::vector<std::string>& edge_order() const { return edge_order_; }

    // One JSON object per line ("type": "meta" | "node" | "edge").
    void persist(std::ostream& sink) const;
    static LifeGraph load(std::istream& source);
    void save_file(const std::string& path) const;
    static LifeGraph load_file(const std::string& path);

    void export_dot(std::ostream& sink) const;

    // Structural identity up to id relabeling (ids here are deterministic,
    // so this is plain content equality).
    bool structurally_equal(const LifeGraph& other) const;

    // Full invariant sweep; throws GraphError on the first violation.
    void check_integrity() const;

private:
    std::string owner_;
    std::unordered_map<std::string, Node> nodes_;
    std::unordered_map<std::string, HyperEdge> edges_;
    std::vector<std::string> node_order_;
    std::vector<std::string> edge_order_;
    // (kind, normalized label) -> node id
    std::unordered_map<std::string, std::string> label_index_;
    // node id -> incident edge ids, insertion order
    std::unordered_map<std::string, std::vector<std::string>> adjacency_;
};

// Deterministic ids: reproducible builds and golden-file tests depend on these.
std::string node_id_for(EntityKind kind, std::string_view normalized_label);
std::string edge_id_for(const std::string& subject_id, std::string_view relation,
                        const std::string& object_id, const EdgeAttrs& attrs);

void merge_refs(std::vector<MediaRef>& into, const std::vector<MediaRef>& from);

}  // namespace lifegraph
