#pragma once
// A Vaccount is a user's personal knowledge space: named concepts with
// personas and portraits, plus a timestamped multimodal history. Media ids
// resolve to files under a media directory.

#include "lifegraph/graph.hpp"
#include "lifegraph/model_client.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lifegraph {

struct Concept {
    std::string name;  // unique within the Vaccount
    std::string persona;
    std::string relation_to_owner;
    MediaRef portrait;
};

struct HistoryEvent {
    std::string date;  // ISO-8601; all images share it
    std::string description;
    std::vector<MediaRef> images;
};

struct Vaccount {
    std::string id;
    std::vector<Concept> concepts;
    std::vector<HistoryEvent> history;  // sorted ascending by date after load
};

// Resolves media ids (relative file names) against a directory.
class MediaStore {
public:
    MediaStore() = default;
    explicit MediaStore(std::string directory) : dir_(std::move(directory)) {}

    bool resolvable(const std::string& media_id) const;
    std::optional<MediaPayload> resolve(const std::string& media_id) const;
    const std::string& directory() const { return dir_; }

private:
    std::string dir_;
};

// Parses and validates a Vaccount JSON document:
//   {"account_id": "...",
//    "concepts": [{"name","persona","relation_to_owner","portrait"}],
//    "history":  [{"date","description","images":[...]}]}
// Throws LoadError with per-field diagnostics; history is returned sorted.
Vaccount load_vaccount(const std::string& path);

// Validation shared with in-memory construction.
void validate_vaccount(const Vaccount& account);

}  // namespace lifegraph
