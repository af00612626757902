#pragma once
// Prompt templates and their stable marker phrases. Scripted-mock matchers
// and tests key on the markers, so changing one is a breaking change for
// every script file.

namespace lifegraph::prompts {

// construction, turn 1 / turn 2
inline constexpr const char* kEntityMarker = "List the candidate entities";
inline constexpr const char* kTripleMarker = "Formalize the factual triples";
inline constexpr const char* kScaffoldMarker = "social network scaffold";
inline constexpr const char* kHistoryMarker = "personal history records";

// retrieval
inline constexpr const char* kTopEntitiesMarker = "Select the most relevant entities";
inline constexpr const char* kPruneMarker = "Score each numbered candidate";
inline constexpr const char* kFetchRefsMarker = "Decide whether source data is needed";
inline constexpr const char* kReasoningMarker = "Is the accumulated context sufficient";
inline constexpr const char* kAnswerMarker = "Answer the personalized question";

// judging
inline constexpr const char* kJudgeMarker = "Reply with CORRECT or INCORRECT";
inline constexpr const char* kSufficientToken = "SUFFICIENT";

}  // namespace lifegraph::prompts
