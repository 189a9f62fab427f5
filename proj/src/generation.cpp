#include "webkg/generation.hpp"

#include "webkg/strings.hpp"

namespace webkg {

std::string_view to_string(ConfidenceTier tier) {
    switch (tier) {
        case ConfidenceTier::low:
            return "low";
        case ConfidenceTier::medium:
            return "medium";
        case ConfidenceTier::high:
            return "high";
    }
    return "low";
}

std::optional<ConfidenceTier> parse_confidence(std::string_view text) {
    auto s = canonicalize(text);
    if (s == "low") {
        return ConfidenceTier::low;
    }
    if (s == "medium") {
        return ConfidenceTier::medium;
    }
    if (s == "high") {
        return ConfidenceTier::high;
    }
    return std::nullopt;
}

const std::string& answer_system_prompt() {
    static const std::string kPrompt =
        "You are provided with a question, current time and various references. Your task is "
        "to answer the question succinctly, using the FEWEST words possible. If you are "
        "absolutely sure, more than 97% confident, please answer directly. If you are not "
        "sure, please respond with 'I don't know'.\n"
        "Please answer the question and provide the confidence tier (high, medium, low) for "
        "your answer. Use the following standards for confidence tiers:\n"
        "\n"
        "- High Confidence (High): The answer provided is almost certainly correct. There is "
        "strong evidence or overwhelming consensus supporting this answer. The model has a "
        "high level of certainty and little to no doubt about this answer.\n"
        "- Medium Confidence (Medium): The answer provided is likely to be correct. There is "
        "some evidence or reasonable support for this answer, but it is not conclusive. The "
        "model has some level of certainty but acknowledges that there is a possibility of "
        "error or alternative answers.\n"
        "- Low Confidence (Low): The answer provided is uncertain or speculative. There is "
        "little to no solid evidence or support for this answer. The model has significant "
        "doubts about the accuracy of this answer and recognizes that it could easily be "
        "incorrect.\n"
        "\n"
        "Output the result in JSON format, answer is a string, confidence is a string (value "
        "is one of high, medium, low), for example output: {\"answer\": \"mayon volcano\", "
        "\"confidence\": \"medium\"}";
    return kPrompt;
}

Prompt build_answer_prompt(const std::string& query, const std::string& query_time,
                           std::span<const Reference> references) {
    std::string context;
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (i > 0) {
            context += "\n\n";
        }
        context += references[i].label;
        context += ' ';
        context += references[i].text;
    }
    Prompt p;
    p.system = answer_system_prompt();
    p.user = "Context: " + context + "\nCurrent Time: " + query_time + "\nQuestion: " + query +
             "\nOutput:";
    return p;
}

std::optional<AnswerPayload> parse_answer_payload(std::string_view reply) {
    auto j = find_json(reply, [](const nlohmann::json& v) {
        if (!v.is_object()) {
            return false;
        }
        auto a = v.find("answer");
        auto c = v.find("confidence");
        return a != v.end() && a->is_string() && c != v.end() && c->is_string() &&
               parse_confidence(c->get<std::string>()).has_value();
    });
    if (!j) {
        return std::nullopt;
    }
    return AnswerPayload{(*j)["answer"].get<std::string>(),
                         *parse_confidence((*j)["confidence"].get<std::string>())};
}

GatedAnswer self_assess_gate(std::string answer, ConfidenceTier confidence,
                             ConfidenceTier threshold) {
    GatedAnswer g;
    g.confidence = confidence;
    g.accepted = confidence >= threshold;
    g.final_text = g.accepted ? answer : std::string(kIDontKnow);
    g.raw_answer = std::move(answer);
    return g;
}

GatedAnswer generate_answer(const std::string& query, const std::string& query_time,
                            std::span<const Reference> references, ChatModel& model,
                            ConfidenceTier threshold) {
    const auto prompt = build_answer_prompt(query, query_time, references);
    for (int attempt = 1; attempt <= 2; ++attempt) {
        auto payload = parse_answer_payload(model.send(prompt));
        if (payload) {
            auto g = self_assess_gate(std::move(payload->answer), payload->confidence, threshold);
            g.attempts = attempt;
            return g;
        }
    }
    GatedAnswer g;
    g.final_text = std::string(kIDontKnow);
    g.unparseable = true;
    g.attempts = 2;
    return g;
}

}  // namespace webkg
