#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "webkg/chat.hpp"

namespace webkg {

enum class Verdict { correct, missing, incorrect };

std::string_view to_string(Verdict v);
int points(Verdict v);  // +1, 0, -1

struct JudgeConfig {
    // When set, a response equal to `false_premise_response` counts as missing.
    bool false_premise_as_missing = false;
    std::string false_premise_response = "invalid question";
};

struct Judgement {
    std::optional<Verdict> verdict;  // empty: the judge backend failed
    bool exact_match = false;
    std::string note;
};

// Trim + ASCII casefold.
std::string normalize_answer(std::string_view s);

const std::string& judge_system_prompt();

// "i don't know" -> missing; normalized exact match -> correct; otherwise the
// judge model decides when given, else ground-truth containment decides.
Judgement judge(const std::string& question, const std::string& response,
                const std::string& ground_truth, ChatModel* judge_model,
                const JudgeConfig& cfg = {});

struct Metrics {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t incorrect = 0;
    std::size_t missing = 0;
    std::size_t exact = 0;

    double accuracy = 0.0;
    double hallucination = 0.0;
    double missing_rate = 0.0;
    double score = 0.0;
    double exact_accuracy = 0.0;
};

// Throws std::invalid_argument on an empty list. `exact_matches` counts the
// items that matched the ground truth exactly, for the Exact Accuracy column.
Metrics aggregate(std::span<const Verdict> verdicts, std::size_t exact_matches = 0);

nlohmann::ordered_json to_json(const Metrics& m);

// One evaluated question as written to the report file.
struct ItemResult {
    std::string id;
    std::string query;
    std::string domain;
    std::string dynamism;
    std::string question_type;
    std::string response;
    std::string ground_truth;
    std::optional<Verdict> verdict;
    bool exact_match = false;
    std::string path;
    std::string confidence;
    bool accepted = false;
    std::string error;
};

struct RunReport {
    std::string label;  // e.g. "threshold=high chunk_size=500"
    std::string threshold;
    std::size_t chunk_size = 0;
    std::vector<ItemResult> items;
    std::optional<Metrics> metrics;  // empty when nothing was judged
    std::size_t unjudged = 0;
    std::size_t failed = 0;
    std::map<std::string, std::map<std::string, Metrics>> groups;  // field -> value -> metrics
};

// Fills metrics, counters, and per-domain/dynamism/question_type groups.
void summarize(RunReport& run);

nlohmann::ordered_json to_json(const RunReport& run, bool include_items = true);

// Fixed-width table with Exact Accuracy, Accuracy, Hallucination, Missing, Score.
std::string format_metrics_table(std::span<const RunReport> runs,
                                 std::string_view first_column = "Run");
std::string format_group_tables(const RunReport& run);

}  // namespace webkg
