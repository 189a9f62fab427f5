#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "webkg/error.hpp"
#include "webkg/generation.hpp"

using namespace webkg;

namespace {

Reference ref(std::string label, std::string text) {
    Reference r;
    r.label = std::move(label);
    r.text = std::move(text);
    return r;
}

}  // namespace

TEST(AnswerPrompt, EmptyReferences) {
    auto p = build_answer_prompt("q?", "2024-03-01", {});
    EXPECT_EQ(p.user, "Context: \nCurrent Time: 2024-03-01\nQuestion: q?\nOutput:");
    EXPECT_EQ(p.system, answer_system_prompt());
}

TEST(AnswerPrompt, ReferencesInOrder) {
    std::vector<Reference> refs{ref("[page 0: A]", "alpha"), ref("[page 1: B]", "beta"),
                                ref("[page 0: A]", "gamma")};
    auto p = build_answer_prompt("q", "t", refs);
    EXPECT_EQ(p.user,
              "Context: [page 0: A] alpha\n\n[page 1: B] beta\n\n[page 0: A] gamma\n"
              "Current Time: t\nQuestion: q\nOutput:");
}

TEST(AnswerPrompt, SystemTextCarriesTierDefinitions) {
    const auto& s = answer_system_prompt();
    EXPECT_NE(s.find("High Confidence (High)"), std::string::npos);
    EXPECT_NE(s.find("Medium Confidence (Medium)"), std::string::npos);
    EXPECT_NE(s.find("Low Confidence (Low)"), std::string::npos);
    EXPECT_NE(s.find("97%"), std::string::npos);
}

TEST(AnswerPrompt, Deterministic) {
    std::vector<Reference> refs{ref("[page 2: C]", "x y z")};
    auto a = build_answer_prompt("q", "t", refs);
    auto b = build_answer_prompt("q", "t", refs);
    EXPECT_EQ(a.system, b.system);
    EXPECT_EQ(a.user, b.user);
}

TEST(ParsePayload, PlainObject) {
    auto p = parse_answer_payload(R"({"answer": "mayon volcano", "confidence": "medium"})");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->answer, "mayon volcano");
    EXPECT_EQ(p->confidence, ConfidenceTier::medium);
}

TEST(ParsePayload, SurroundingProseAndCase) {
    auto p = parse_answer_payload(R"(Sure! {"answer":"Paris","confidence":"HIGH"})");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->answer, "Paris");
    EXPECT_EQ(p->confidence, ConfidenceTier::high);
}

TEST(ParsePayload, CodeFence) {
    auto p = parse_answer_payload("```json\n{\"answer\": \"42\", \"confidence\": \"Low\"}\n```");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->answer, "42");
    EXPECT_EQ(p->confidence, ConfidenceTier::low);
}

TEST(ParsePayload, SkipsObjectsWithoutFields) {
    auto p = parse_answer_payload(
        R"({"note": 1} then {"answer": "b", "confidence": "high"})");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->answer, "b");
}

TEST(ParsePayload, Failures) {
    EXPECT_FALSE(parse_answer_payload("no structured content"));
    EXPECT_FALSE(parse_answer_payload(""));
    EXPECT_FALSE(parse_answer_payload(R"({"answer": "x", "confidence": "certain"})"));
    EXPECT_FALSE(parse_answer_payload(R"({"answer": 3, "confidence": "high"})"));
    EXPECT_FALSE(parse_answer_payload(R"({"answer": "x", "confidence": "high")"));
}

TEST(Gate, Examples) {
    auto a = self_assess_gate("Paris", ConfidenceTier::high, ConfidenceTier::high);
    EXPECT_TRUE(a.accepted);
    EXPECT_EQ(a.final_text, "Paris");
    auto b = self_assess_gate("Paris", ConfidenceTier::medium, ConfidenceTier::high);
    EXPECT_FALSE(b.accepted);
    EXPECT_EQ(b.final_text, "I don't know");
    EXPECT_EQ(b.raw_answer, "Paris");
}

TEST(Gate, LowAcceptsAll) {
    for (auto c : {ConfidenceTier::low, ConfidenceTier::medium, ConfidenceTier::high}) {
        EXPECT_TRUE(self_assess_gate("x", c, ConfidenceTier::low).accepted);
    }
}

TEST(Gate, MonotoneInThreshold) {
    const std::vector<ConfidenceTier> tiers{ConfidenceTier::low, ConfidenceTier::medium,
                                            ConfidenceTier::high};
    std::vector<ConfidenceTier> answers;
    for (int i = 0; i < 30; ++i) {
        answers.push_back(tiers[(i * 7) % 3]);
    }
    int previous = 1 << 30;
    for (auto t : tiers) {
        int accepted = 0;
        for (auto c : answers) {
            accepted += self_assess_gate("x", c, t).accepted ? 1 : 0;
        }
        EXPECT_LE(accepted, previous);
        previous = accepted;
    }
}

TEST(Generate, AcceptsScriptedExample) {
    ScriptedChatModel model;
    model.set_fallback(R"({"answer": "mayon volcano", "confidence": "medium"})");
    auto g = generate_answer("which volcano", "t", {}, model, ConfidenceTier::medium);
    EXPECT_TRUE(g.accepted);
    EXPECT_EQ(g.final_text, "mayon volcano");
    EXPECT_EQ(g.attempts, 1);
}

TEST(Generate, GarbageTwiceAbstains) {
    ScriptedChatModel model;
    model.set_fallback("not json at all");
    auto g = generate_answer("q", "t", {}, model, ConfidenceTier::low);
    EXPECT_FALSE(g.accepted);
    EXPECT_TRUE(g.unparseable);
    EXPECT_EQ(g.final_text, "I don't know");
    EXPECT_EQ(model.calls(), 2u);
}

TEST(Generate, RetrySucceeds) {
    int n = 0;
    FunctionChatModel model([&](const std::string&, const std::string&) {
        return ++n == 1 ? std::string("oops")
                        : std::string(R"({"answer": "ok", "confidence": "high"})");
    });
    auto g = generate_answer("q", "t", {}, model, ConfidenceTier::high);
    EXPECT_TRUE(g.accepted);
    EXPECT_EQ(g.attempts, 2);
}

TEST(Generate, LowConfidenceUnderHighThreshold) {
    ScriptedChatModel model;
    model.set_fallback(R"({"answer": "maybe", "confidence": "low"})");
    auto g = generate_answer("q", "t", {}, model, ConfidenceTier::high);
    EXPECT_FALSE(g.accepted);
    EXPECT_EQ(g.final_text, "I don't know");
}

TEST(Generate, TransportErrorPropagates) {
    FunctionChatModel model([](const std::string&, const std::string&) -> std::string {
        throw BackendError("down");
    });
    EXPECT_THROW(generate_answer("q", "t", {}, model, ConfidenceTier::high), BackendError);
}

TEST(Confidence, ParseAndPrint) {
    EXPECT_EQ(parse_confidence("Medium"), ConfidenceTier::medium);
    EXPECT_FALSE(parse_confidence("very high"));
    EXPECT_EQ(to_string(ConfidenceTier::high), "high");
}
