#pragma once
// Benchmark harness: load QA items for a Vaccount, run any answerer over the
// ten task types, score by exact match or LLM-as-a-judge, and aggregate
// per-(task, difficulty) accuracy.

#include "lifegraph/model_client.hpp"
#include "lifegraph/vaccount.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lifegraph {

enum class AnswerType { MultipleChoice, Binary, Open };
enum class Difficulty { Easy, Medium, Hard };

const char* to_string(AnswerType t);
const char* to_string(Difficulty d);
std::optional<AnswerType> answer_type_from_string(std::string_view s);
std::optional<Difficulty> difficulty_from_string(std::string_view s);

// The ten benchmark task names; items must use one of these.
const std::vector<std::string>& task_names();

struct QAItem {
    std::string id;
    std::string vaccount_id;
    std::string task;
    std::string category;
    Difficulty difficulty = Difficulty::Medium;
    std::string input_text;
    std::vector<std::string> input_media;
    AnswerType answer_type = AnswerType::Open;
    std::vector<std::string> choices;  // multiple_choice only
    std::string gold;
};

// QA file is JSON-lines next to the Vaccount document: <stem>.qa.jsonl, with
// media under a sibling "media" directory. All item invariants and media
// resolvability are validated; violations raise LoadError listing item ids.
std::pair<Vaccount, std::vector<QAItem>> load_vaccount_qa(const std::string& vaccount_path);

std::vector<QAItem> load_qa_file(const std::string& qa_path, const Vaccount& account,
                                 const MediaStore& media);

// Exact match for multiple_choice / binary after normalization (trim,
// case-fold, strip trailing punctuation; bare choice letter or full choice
// text both accepted). Wrong answer_type throws GraphError.
int score_exact(const std::string& prediction, const QAItem& item);

struct JudgeVerdict {
    std::optional<int> score;  // nullopt: unparsable verdict, item unanswered
    std::string rationale;
};

// LLM-as-a-judge for open items; verdict is a single CORRECT/INCORRECT token
// on the judge's last line.
JudgeVerdict score_judge(const std::string& prediction, const QAItem& item, ModelClient& judge);

struct CellStats {
    long correct = 0;
    long incorrect = 0;
    long unanswered = 0;
    long answered() const { return correct + incorrect; }
    double accuracy() const {
        return answered() > 0 ? static_cast<double>(correct) / answered() : 0.0;
    }
};

struct ItemVerdict {
    std::string id;
    std::string task;
    Difficulty difficulty;
    std::string scorer;  // "exact" | "judge" | "none"
    std::string prediction;
    bool answered = false;
    int score = 0;
    std::string rationale;  // judge output for open items
};

struct EvalReport {
    std::map<std::pair<std::string, std::string>, CellStats> cells;  // (task, difficulty)
    std::vector<ItemVerdict> items;
};

// Answerer failures (exceptions) count the item as unanswered.
using Answerer = std::function<std::string(const QAItem&)>;

EvalReport run_eval(const Vaccount& account, const std::vector<QAItem>& items,
                    const Answerer& answerer, ModelClient* judge);

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

}  // namespace lifegraph
