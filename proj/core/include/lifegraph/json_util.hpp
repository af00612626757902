#pragma once
// Tolerant extraction of the first valid JSON object from chatty model output:
// fenced ```json blocks are preferred, then the first balanced {...} span.

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace lifegraph {

inline std::optional<nlohmann::json> try_parse_json(std::string_view s) {
    auto parsed = nlohmann::json::parse(s, nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

inline std::optional<nlohmann::json> extract_json_block(std::string_view text) {
    // fenced block first
    size_t fence = text.find("```");
    while (fence != std::string_view::npos) {
        size_t start = text.find('\n', fence);
        if (start == std::string_view::npos) break;
        size_t end = text.find("```", start);
        if (end == std::string_view::npos) break;
        if (auto j = try_parse_json(text.substr(start + 1, end - start - 1))) return j;
        fence = text.find("```", end + 3);
    }
    // first balanced object
    size_t open = text.find('{');
    while (open != std::string_view::npos) {
        int depth = 0;
        bool in_str = false;
        bool esc = false;
        for (size_t i = open; i < text.size(); ++i) {
            char c = text[i];
            if (esc) {
                esc = false;
            } else if (in_str) {
                if (c == '\\') esc = true;
                else if (c == '"') in_str = false;
            } else if (c == '"') {
                in_str = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    if (auto j = try_parse_json(text.substr(open, i - open + 1))) return j;
                    break;
                }
            }
        }
        open = text.find('{', open + 1);
    }
    return std::nullopt;
}

}  // namespace lifegraph
