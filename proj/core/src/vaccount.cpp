#include "lifegraph/vaccount.hpp"

#include "lifegraph/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lifegraph {

namespace fs = std::filesystem;

bool MediaStore::resolvable(const std::string& media_id) const {
    if (dir_.empty() || media_id.empty()) return false;
    if (media_id.find("..") != std::string::npos) return false;
    return fs::is_regular_file(fs::path(dir_) / media_id);
}

std::optional<MediaPayload> MediaStore::resolve(const std::string& media_id) const {
    if (!resolvable(media_id)) return std::nullopt;
    std::ifstream in(fs::path(dir_) / media_id, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    MediaPayload p;
    p.media_id = media_id;
    p.bytes = buf.str();
    std::string ext = fs::path(media_id).extension().string();
    if (ext == ".txt") p.mime = "text/plain";
    else if (ext == ".png") p.mime = "image/png";
    else p.mime = "image/jpeg";
    return p;
}

void validate_vaccount(const Vaccount& account) {
    if (account.id.empty()) throw LoadError("vaccount: empty account_id");
    if (account.concepts.empty()) throw LoadError("vaccount: at least one concept required");
    std::set<std::string> names;
    for (const auto& c : account.concepts) {
        if (c.name.empty()) throw LoadError("vaccount: concept with empty name");
        if (!names.insert(normalize_label(c.name)).second) {
            throw LoadError("vaccount: duplicate concept name '" + c.name + "'");
        }
    }
    for (const auto& ev : account.history) {
        if (!is_iso_date(ev.date)) {
            throw LoadError("vaccount: event date '" + ev.date + "' is not a full ISO-8601 date");
        }
        for (const auto& img : ev.images) {
            if (img.media_id.empty()) throw LoadError("vaccount: event with empty media id");
            if (img.date != ev.date) {
                throw LoadError("vaccount: media '" + img.media_id +
                                "' date differs from its event date " + ev.date);
            }
        }
    }
    if (!std::is_sorted(account.history.begin(), account.history.end(),
                        [](const auto& a, const auto& b) { return a.date < b.date; })) {
        throw LoadError("vaccount: history not sorted by date");
    }
}

Vaccount load_vaccount(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open vaccount file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw LoadError("bad vaccount JSON " + path + ": " + e.what());
    }
    Vaccount account;
    try {
        account.id = doc.at("account_id").get<std::string>();
        for (const auto& c : doc.at("concepts")) {
            Concept entry;
            entry.name = c.at("name").get<std::string>();
            entry.persona = c.value("persona", "");
            entry.relation_to_owner = c.value("relation_to_owner", "");
            if (c.contains("portrait")) {
                entry.portrait.media_id = c["portrait"].value("media_id", "");
                entry.portrait.date = c["portrait"].value("date", "");
            }
            account.concepts.push_back(std::move(entry));
        }
        for (const auto& e : doc.value("history", nlohmann::json::array())) {
            HistoryEvent ev;
            ev.date = e.at("date").get<std::string>();
            ev.description = e.value("description", "");
            for (const auto& img : e.value("images", nlohmann::json::array())) {
                ev.images.push_back({img.get<std::string>(), ev.date});
            }
            account.history.push_back(std::move(ev));
        }
    } catch (const std::exception& e) {
        throw LoadError("vaccount " + path + ": " + e.what());
    }
    std::stable_sort(account.history.begin(), account.history.end(),
                     [](const auto& a, const auto& b) { return a.date < b.date; });
    validate_vaccount(account);
    return account;
}

}  // namespace lifegraph
