#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "webkg/chat.hpp"
#include "webkg/retrieval_pipeline.hpp"

namespace webkg {

// Byte-exact abstention text; the evaluation harness keys on it.
inline constexpr std::string_view kIDontKnow = "I don't know";

enum class ConfidenceTier { low = 0, medium = 1, high = 2 };

std::string_view to_string(ConfidenceTier tier);
// Case-insensitive; only "low", "medium", "high" parse.
std::optional<ConfidenceTier> parse_confidence(std::string_view text);

struct AnswerPayload {
    std::string answer;
    ConfidenceTier confidence = ConfidenceTier::low;
};

struct GatedAnswer {
    std::string raw_answer;
    ConfidenceTier confidence = ConfidenceTier::low;
    bool accepted = false;
    std::string final_text;
    bool unparseable = false;  // both attempts produced no usable payload
    int attempts = 0;
};

const std::string& answer_system_prompt();

// User turn: "Context: ...", "Current Time: ...", "Question: ...", "Output:".
// References are "label text" blocks separated by blank lines.
Prompt build_answer_prompt(const std::string& query, const std::string& query_time,
                           std::span<const Reference> references);

std::optional<AnswerPayload> parse_answer_payload(std::string_view reply);

GatedAnswer self_assess_gate(std::string answer, ConfidenceTier confidence,
                             ConfidenceTier threshold);

// Prompt, send, parse with one retry, gate. Transport errors propagate as
// BackendError; two unusable replies abstain.
GatedAnswer generate_answer(const std::string& query, const std::string& query_time,
                            std::span<const Reference> references, ChatModel& model,
                            ConfidenceTier threshold);

}  // namespace webkg
