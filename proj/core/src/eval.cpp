#include "lifegraph/eval.hpp"

#include "lifegraph/prompts.hpp"
#include "lifegraph/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lifegraph {

namespace fs = std::filesystem;

const char* to_string(AnswerType t) {
    switch (t) {
        case AnswerType::MultipleChoice: return "multiple_choice";
        case AnswerType::Binary: return "binary";
        case AnswerType::Open: return "open";
    }
    return "open";
}

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "medium";
}

std::optional<AnswerType> answer_type_from_string(std::string_view s) {
    if (s == "multiple_choice") return AnswerType::MultipleChoice;
    if (s == "binary") return AnswerType::Binary;
    if (s == "open") return AnswerType::Open;
    return std::nullopt;
}

std::optional<Difficulty> difficulty_from_string(std::string_view s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    if (s == "hard") return Difficulty::Hard;
    return std::nullopt;
}

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {
        "Text Concept QA",
        "Visual Concept Recognition",
        "Concept VQA",
        "Scene and Activity",
        "Direct Person-Centric",
        "Relational Person-Centric",
        "Fine-Grained Scene",
        "Preference and Persona",
        "Frequency and Counting",
        "Relational Temporal Reasoning",
    };
    return names;
}

namespace {

std::string normalize_answer(std::string_view s) {
    std::string n = normalize_label(s);
    while (!n.empty() && (n.back() == '.' || n.back() == '!' || n.back() == '?' ||
                          n.back() == ',' || n.back() == ';' || n.back() == ':')) {
        n.pop_back();
    }
    return n;
}

// Resolve an answer to a choice index: bare letter or full choice text.
int choice_index(const std::string& answer, const std::vector<std::string>& choices) {
    std::string n = normalize_answer(answer);
    if (n.size() == 1 && n[0] >= 'a' && n[0] < 'a' + static_cast<int>(choices.size())) {
        return n[0] - 'a';
    }
    for (size_t i = 0; i < choices.size(); ++i) {
        if (normalize_answer(choices[i]) == n) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

std::vector<QAItem> load_qa_file(const std::string& qa_path, const Vaccount& account,
                                 const MediaStore& media) {
    std::ifstream in(qa_path);
    if (!in) throw LoadError("cannot open QA file: " + qa_path);

    std::vector<QAItem> items;
    std::vector<std::string> bad;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json o = nlohmann::json::parse(line, nullptr, false);
        if (o.is_discarded()) {
            bad.push_back("line " + std::to_string(lineno) + ": malformed JSON");
            continue;
        }
        QAItem item;
        item.id = o.value("id", "");
        std::string why;
        try {
            item.vaccount_id = o.at("vaccount_id").get<std::string>();
            item.task = o.at("task").get<std::string>();
            item.category = o.value("category", "");
            item.input_text = o.at("input_text").get<std::string>();
            item.input_media = o.value("input_media", std::vector<std::string>{});
            item.choices = o.value("choices", std::vector<std::string>{});
            item.gold = o.at("gold").get<std::string>();
            auto diff = difficulty_from_string(o.at("difficulty").get<std::string>());
            auto type = answer_type_from_string(o.at("answer_type").get<std::string>());

            if (item.id.empty()) why = "missing id";
            else if (item.vaccount_id != account.id) why = "vaccount_id mismatch";
            else if (std::find(task_names().begin(), task_names().end(), item.task) ==
                     task_names().end()) why = "unknown task '" + item.task + "'";
            else if (!diff) why = "bad difficulty";
            else if (!type) why = "bad answer_type";
            else {
                item.difficulty = *diff;
                item.answer_type = *type;
                if (item.answer_type == AnswerType::MultipleChoice) {
                    if (item.choices.size() < 2) {
                        why = "multiple_choice needs >= 2 choices";
                    } else if (choice_index(item.gold, item.choices) < 0) {
                        why = "gold not among choices";
                    }
                } else if (item.answer_type == AnswerType::Binary) {
                    std::string g = normalize_answer(item.gold);
                    if (g != "yes" && g != "no") why = "binary gold must be yes/no";
                }
                for (const auto& m : item.input_media) {
                    if (!media.resolvable(m)) {
                        why = "unresolvable media '" + m + "'";
                        break;
                    }
                }
            }
        } catch (const std::exception& e) {
            why = e.what();
        }
        if (!why.empty()) {
            bad.push_back((item.id.empty() ? "line " + std::to_string(lineno) : item.id) + ": " +
                          why);
            continue;
        }
        items.push_back(std::move(item));
    }
    if (!bad.empty()) {
        std::string msg = "QA file " + qa_path + " has invalid items:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw LoadError(msg);
    }
    return items;
}

std::pair<Vaccount, std::vector<QAItem>> load_vaccount_qa(const std::string& vaccount_path) {
    Vaccount account = load_vaccount(vaccount_path);
    fs::path vp(vaccount_path);
    fs::path qa = vp.parent_path() / (vp.stem().string() + ".qa.jsonl");
    MediaStore media((vp.parent_path() / "media").string());
    return {account, load_qa_file(qa.string(), account, media)};
}

int score_exact(const std::string& prediction, const QAItem& item) {
    if (item.answer_type == AnswerType::Open) {
        throw GraphError("score_exact: open items must go through the judge");
    }
    if (item.answer_type == AnswerType::MultipleChoice) {
        int p = choice_index(prediction, item.choices);
        int g = choice_index(item.gold, item.choices);
        return (p >= 0 && p == g) ? 1 : 0;
    }
    return normalize_answer(prediction) == normalize_answer(item.gold) ? 1 : 0;
}

JudgeVerdict score_judge(const std::string& prediction, const QAItem& item, ModelClient& judge) {
    if (item.answer_type != AnswerType::Open) {
        throw GraphError("score_judge: only open items are judged");
    }
    std::ostringstream prompt;
    prompt << "Judge whether the prediction answers the question correctly given the gold "
              "answer. "
           << prompts::kJudgeMarker << " as the single token on the last line.\n\nQuestion: "
           << item.input_text << "\nGold answer: " << item.gold
           << "\nPrediction: " << prediction << "\n";
    Conversation conv;
    conv.push_back({Role::User, prompt.str(), {}});

    JudgeVerdict verdict;
    ModelResponse r;
    try {
        r = judge.complete(conv);
    } catch (const ModelError& e) {
        verdict.rationale = std::string("judge failure: ") + e.what();
        return verdict;
    }
    verdict.rationale = r.text;

    // last non-empty line, single token
    std::istringstream lines(r.text);
    std::string line, last;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) last = line;
    }
    std::string tok = normalize_answer(last);
    if (tok == "correct") verdict.score = 1;
    else if (tok == "incorrect") verdict.score = 0;
    return verdict;
}

EvalReport run_eval(const Vaccount& account, const std::vector<QAItem>& items,
                    const Answerer& answerer, ModelClient* judge) {
    (void)account;
    EvalReport report;
    for (const auto& item : items) {
        ItemVerdict v;
        v.id = item.id;
        v.task = item.task;
        v.difficulty = item.difficulty;
        auto& cell = report.cells[{item.task, to_string(item.difficulty)}];

        bool have_prediction = true;
        try {
            v.prediction = answerer(item);
        } catch (const std::exception& e) {
            v.scorer = "none";
            v.rationale = std::string("answerer failure: ") + e.what();
            have_prediction = false;
        }
        if (!have_prediction) {
            ++cell.unanswered;
            report.items.push_back(std::move(v));
            continue;
        }

        if (item.answer_type == AnswerType::Open) {
            v.scorer = "judge";
            if (!judge) {
                ++cell.unanswered;
                v.rationale = "no judge configured";
                report.items.push_back(std::move(v));
                continue;
            }
            JudgeVerdict jv = score_judge(v.prediction, item, *judge);
            v.rationale = jv.rationale;
            if (!jv.score) {
                ++cell.unanswered;
                report.items.push_back(std::move(v));
                continue;
            }
            v.answered = true;
            v.score = *jv.score;
        } else {
            v.scorer = "exact";
            v.answered = true;
            v.score = score_exact(v.prediction, item);
        }
        if (v.score) ++cell.correct;
        else ++cell.incorrect;
        report.items.push_back(std::move(v));
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json doc;
    auto cells = nlohmann::ordered_json::array();
    for (const auto& [key, stats] : report.cells) {
        nlohmann::ordered_json c;
        c["task"] = key.first;
        c["difficulty"] = key.second;
        c["correct"] = stats.correct;
        c["incorrect"] = stats.incorrect;
        c["unanswered"] = stats.unanswered;
        c["accuracy"] = stats.accuracy();
        cells.push_back(std::move(c));
    }
    doc["cells"] = std::move(cells);
    auto items = nlohmann::ordered_json::array();
    for (const auto& v : report.items) {
        nlohmann::ordered_json i;
        i["id"] = v.id;
        i["task"] = v.task;
        i["difficulty"] = to_string(v.difficulty);
        i["scorer"] = v.scorer;
        i["prediction"] = v.prediction;
        i["answered"] = v.answered;
        i["score"] = v.score;
        i["rationale"] = v.rationale;
        items.push_back(std::move(i));
    }
    doc["items"] = std::move(items);
    return doc.dump(2);
}

std::string report_to_table(const EvalReport& report) {
    std::ostringstream out;
    out << "task                              difficulty  acc     correct incorrect unanswered\n";
    for (const auto& [key, stats] : report.cells) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-33s %-11s %.4f  %-7ld %-9ld %ld\n", key.first.c_str(),
                      key.second.c_str(), stats.accuracy(), stats.correct, stats.incorrect,
                      stats.unanswered);
        out << buf;
    }
    return out.str();
}

}  // namespace lifegraph
