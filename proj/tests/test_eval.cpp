#include "lifegraph/eval.hpp"

#include "lifegraph/prompts.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <map>

#include "support.hpp"

using namespace lifegraph;

namespace {

QAItem mc_item(std::vector<std::string> choices, std::string gold) {
    QAItem item;
    item.id = "t";
    item.answer_type = AnswerType::MultipleChoice;
    item.choices = std::move(choices);
    item.gold = std::move(gold);
    return item;
}

QAItem binary_item(std::string gold) {
    QAItem item;
    item.id = "t";
    item.answer_type = AnswerType::Binary;
    item.gold = std::move(gold);
    return item;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("eval_tmp_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("the ten benchmark tasks are fixed") {
    const auto& names = task_names();
    CHECK(names.size() == 10);
    CHECK(names.front() == "Text Concept QA");
    CHECK(names.back() == "Relational Temporal Reasoning");
}

TEST_CASE("load_vaccount_qa reads the fixture: 40 validated items") {
    auto [account, items] = load_vaccount_qa(testsupport::fixture_path("acct.json"));
    CHECK(account.id == "acct-david");
    CHECK(items.size() == 40);
    std::map<std::string, int> per_task;
    for (const auto& item : items) ++per_task[item.task];
    CHECK(per_task.size() == 10);
    CHECK(per_task["Text Concept QA"] == 6);
    CHECK(per_task["Visual Concept Recognition"] == 6);
    CHECK(per_task["Relational Temporal Reasoning"] == 4);
}

TEST_CASE("load_qa_file aggregates every invalid item into one error") {
    Vaccount account;
    account.id = "acct-x";
    Concept c;
    c.name = "Owner";
    account.concepts.push_back(c);
    MediaStore media(testsupport::fixture_path("media"));

    std::string lines =
        R"({"id":"ok1","vaccount_id":"acct-x","task":"Text Concept QA","difficulty":"easy","input_text":"q","answer_type":"multiple_choice","choices":["a1","a2"],"gold":"a1"})"
        "\n"
        R"({"id":"bad_gold","vaccount_id":"acct-x","task":"Text Concept QA","difficulty":"easy","input_text":"q","answer_type":"multiple_choice","choices":["a1","a2"],"gold":"a3"})"
        "\n"
        R"({"id":"bad_task","vaccount_id":"acct-x","task":"Made Up Task","difficulty":"easy","input_text":"q","answer_type":"open","gold":"g"})"
        "\n"
        R"({"id":"bad_binary","vaccount_id":"acct-x","task":"Text Concept QA","difficulty":"easy","input_text":"q","answer_type":"binary","gold":"maybe"})"
        "\n"
        R"({"id":"bad_media","vaccount_id":"acct-x","task":"Concept VQA","difficulty":"easy","input_text":"q","answer_type":"multiple_choice","choices":["a1","a2"],"gold":"a1","input_media":["nope.txt"]})"
        "\n"
        R"({"id":"bad_acct","vaccount_id":"acct-y","task":"Text Concept QA","difficulty":"easy","input_text":"q","answer_type":"open","gold":"g"})"
        "\n";
    TempFile f("bad.qa.jsonl", lines);
    try {
        load_qa_file(f.path, account, media);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        std::string msg = e.what();
        CHECK(msg.find("bad_gold") != std::string::npos);
        CHECK(msg.find("bad_task") != std::string::npos);
        CHECK(msg.find("bad_binary") != std::string::npos);
        CHECK(msg.find("bad_media") != std::string::npos);
        CHECK(msg.find("bad_acct") != std::string::npos);
        CHECK(msg.find("ok1") == std::string::npos);
    }
}

TEST_CASE("score_exact truth table") {
    QAItem mc = mc_item({"A golden retriever", "A black cat", "A parrot"}, "A golden retriever");
    // full text, case, punctuation, whitespace
    CHECK(score_exact("A golden retriever", mc) == 1);
    CHECK(score_exact("a GOLDEN retriever", mc) == 1);
    CHECK(score_exact("A golden retriever.", mc) == 1);
    CHECK(score_exact("  A golden  retriever ", mc) == 1);
    CHECK(score_exact("A black cat", mc) == 0);
    CHECK(score_exact("golden retriever", mc) == 0);  // partial text is not a choice
    // bare letter index
    CHECK(score_exact("a", mc) == 1);
    CHECK(score_exact("A", mc) == 1);
    CHECK(score_exact("b", mc) == 0);
    CHECK(score_exact("C.", mc) == 0);
    CHECK(score_exact("e", mc) == 0);  // out of range, not a choice either
    CHECK(score_exact("", mc) == 0);

    QAItem mc2 = mc_item({"yes", "no"}, "no");
    CHECK(score_exact("b", mc2) == 1);
    CHECK(score_exact("no", mc2) == 1);
    CHECK(score_exact("a", mc2) == 0);

    QAItem yes = binary_item("yes");
    CHECK(score_exact("yes", yes) == 1);
    CHECK(score_exact("Yes.", yes) == 1);
    CHECK(score_exact("YES!", yes) == 1);
    CHECK(score_exact("no", yes) == 0);
    CHECK(score_exact("yeah", yes) == 0);

    QAItem no = binary_item("No");
    CHECK(score_exact("no", no) == 1);
    CHECK(score_exact(" NO ", no) == 1);
    CHECK(score_exact("yes", no) == 0);

    QAItem open;
    open.answer_type = AnswerType::Open;
    open.gold = "anything";
    CHECK_THROWS_AS(score_exact("anything", open), GraphError);
}

TEST_CASE("score_judge parses the last-line verdict token") {
    QAItem item;
    item.answer_type = AnswerType::Open;
    item.input_text = "Where?";
    item.gold = "Downtown.";

    auto judge_with = [&](const std::string& reply) {
        CallbackClient judge([&](const Conversation&) { return reply; });
        return score_judge("Downtown.", item, judge);
    };
    CHECK(judge_with("The prediction matches.\nCORRECT").score == 1);
    CHECK(judge_with("Reasoning...\nincorrect").score == 0);
    CHECK(judge_with("CORRECT.\n\n  \n").score == 1);  // trailing blank lines ignored
    CHECK_FALSE(judge_with("no verdict anywhere").score.has_value());
    CHECK_FALSE(judge_with("").score.has_value());
    // the verdict is the last non-empty line's token, not an earlier one
    CHECK(judge_with("CORRECT\nINCORRECT").score == 0);

    CallbackClient thrower([](const Conversation&) -> std::string { throw ModelError("down"); });
    JudgeVerdict v = score_judge("Downtown.", item, thrower);
    CHECK_FALSE(v.score.has_value());
    CHECK(v.rationale.find("judge failure") != std::string::npos);

    QAItem not_open = mc_item({"a1", "a2"}, "a1");
    CallbackClient judge([](const Conversation&) { return std::string("CORRECT"); });
    CHECK_THROWS_AS(score_judge("a1", not_open, judge), GraphError);
}

TEST_CASE("run_eval on the fixture reproduces the hand-computed table") {
    auto [account, items] = load_vaccount_qa(testsupport::fixture_path("acct.json"));
    ScriptedMock judge =
        ScriptedMock::from_script_file(testsupport::fixture_path("fixture_mock.json"));

    // scripted answerer; items absent from the script count as unanswered
    nlohmann::json answers;
    {
        std::ifstream in(testsupport::fixture_path("answers.json"));
        REQUIRE(in.good());
        in >> answers;
    }
    Answerer answerer = [&](const QAItem& item) -> std::string {
        if (!answers.contains(item.id)) throw ModelError("no scripted answer for " + item.id);
        return answers[item.id].get<std::string>();
    };

    EvalReport report = run_eval(account, items, answerer, &judge);
    CHECK(report.items.size() == 40);

    using Cell = std::tuple<long, long, long>;  // correct, incorrect, unanswered
    auto cell = [&](const std::string& task, const std::string& diff) {
        const CellStats& s = report.cells.at({task, diff});
        return Cell{s.correct, s.incorrect, s.unanswered};
    };
    CHECK(cell("Text Concept QA", "easy") == Cell{3, 1, 0});
    CHECK(cell("Text Concept QA", "medium") == Cell{1, 1, 0});
    CHECK(cell("Visual Concept Recognition", "easy") == Cell{2, 2, 0});
    CHECK(cell("Visual Concept Recognition", "medium") == Cell{2, 0, 0});
    CHECK(cell("Concept VQA", "easy") == Cell{1, 1, 0});
    CHECK(cell("Concept VQA", "medium") == Cell{2, 0, 0});
    CHECK(cell("Scene and Activity", "medium") == Cell{3, 1, 0});
    CHECK(cell("Direct Person-Centric", "medium") == Cell{2, 1, 1});
    CHECK(cell("Relational Person-Centric", "medium") == Cell{3, 0, 0});
    CHECK(cell("Fine-Grained Scene", "medium") == Cell{1, 1, 1});
    CHECK(cell("Preference and Persona", "medium") == Cell{2, 1, 0});
    CHECK(cell("Frequency and Counting", "hard") == Cell{1, 2, 0});
    CHECK(cell("Relational Temporal Reasoning", "hard") == Cell{2, 2, 0});

    CHECK(report.cells.at({"Text Concept QA", "easy"}).accuracy() == doctest::Approx(0.75));
    CHECK(report.cells.at({"Direct Person-Centric", "medium"}).accuracy() ==
          doctest::Approx(2.0 / 3.0));

    // unanswered items carry a reason, not a score
    long unanswered = 0;
    for (const auto& v : report.items) {
        if (!v.answered) {
            ++unanswered;
            CHECK(!v.rationale.empty());
        }
    }
    CHECK(unanswered == 2);

    std::string json = report_to_json(report);
    auto parsed = nlohmann::json::parse(json);
    CHECK(parsed["cells"].size() == 13);
    CHECK(parsed["items"].size() == 40);

    std::string table = report_to_table(report);
    CHECK(table.find("Frequency and Counting") != std::string::npos);
    CHECK(table.find("0.3333") != std::string::npos);
}

TEST_CASE("run_eval: open items without a judge are unanswered") {
    QAItem open;
    open.id = "o1";
    open.task = "Scene and Activity";
    open.difficulty = Difficulty::Medium;
    open.answer_type = AnswerType::Open;
    open.input_text = "q";
    open.gold = "g";

    Vaccount account;
    account.id = "acct-x";
    EvalReport r = run_eval(account, {open}, [](const QAItem&) { return std::string("g"); },
                            nullptr);
    const CellStats& s = r.cells.at({"Scene and Activity", "medium"});
    CHECK(s.unanswered == 1);
    CHECK(s.answered() == 0);
    CHECK(s.accuracy() == 0.0);
}
