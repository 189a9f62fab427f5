#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include "webkg/chat.hpp"
#include "webkg/error.hpp"
#include "webkg/strings.hpp"

using namespace webkg;

namespace {

std::string temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "webkg_chat_test";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST(PromptHash, SeparatorMatters) {
    EXPECT_EQ(prompt_hash("ab", "c").size(), 16u);
    EXPECT_NE(prompt_hash("ab", "c"), prompt_hash("a", "bc"));
    EXPECT_EQ(prompt_hash("a", "b"), prompt_hash("a", "b"));
}

TEST(PromptHash, EmptyPair) {
    // FNV-1a-64 of the single byte 0x1e.
    std::uint64_t h = 0xcbf29ce484222325ull;
    h ^= 0x1e;
    h *= 0x100000001b3ull;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    EXPECT_EQ(prompt_hash("", ""), buf);
}

TEST(ScriptedChat, ReplaysAndFallsBack) {
    ScriptedChatModel m;
    m.add(Prompt{"s", "u"}, "hello");
    EXPECT_EQ(m.send("s", "u"), "hello");
    EXPECT_EQ(m.send("s", "other"), "");
    m.set_fallback("fb");
    EXPECT_EQ(m.send("s", "other"), "fb");
    EXPECT_EQ(m.calls(), 3u);
    EXPECT_EQ(m.misses(), 2u);
}

TEST(ScriptedChat, StrictThrows) {
    ScriptedChatModel m;
    m.set_strict(true);
    EXPECT_THROW(m.send("s", "u"), BackendError);
}

TEST(ScriptedChat, FileRoundTrip) {
    ScriptedChatModel m;
    m.add(Prompt{"s1", "u1"}, "r1");
    m.add(Prompt{"s2", "u2"}, "line\nbreak");
    auto path = temp_path("replay.jsonl");
    {
        std::ofstream out(path);
        out << m.to_jsonl();
    }
    auto loaded = ScriptedChatModel::load(path);
    EXPECT_EQ(loaded->size(), 2u);
    EXPECT_EQ(loaded->send("s2", "u2"), "line\nbreak");
}

TEST(ScriptedChat, BadFileIsDataError) {
    auto path = temp_path("bad.jsonl");
    {
        std::ofstream out(path);
        out << "{\"prompt_hash\": \"00\", \"reply\": \"x\"}\nnot json\n";
    }
    EXPECT_THROW(ScriptedChatModel::load(path), DataError);
    EXPECT_THROW(ScriptedChatModel::load(temp_path("absent.jsonl")), DataError);
}

TEST(FindJson, FirstAccepted) {
    auto j = find_json("x {\"a\": 1} y [1, 2] {\"b\": 2}",
                       [](const nlohmann::json& v) { return v.contains("b"); });
    ASSERT_TRUE(j);
    EXPECT_EQ((*j)["b"], 2);
}

TEST(FindJson, BracesInsideStrings) {
    auto j = find_json(R"(lead {"t": "a } b", "k": 1} tail)",
                       [](const nlohmann::json& v) { return v.is_object(); });
    ASSERT_TRUE(j);
    EXPECT_EQ((*j)["t"], "a } b");
}

TEST(FindJson, NothingFound) {
    EXPECT_FALSE(find_json("plain text {broken", [](const nlohmann::json&) { return true; }));
}

TEST(BoundedChat, CapsInFlight) {
    std::atomic<int> current{0};
    std::atomic<int> peak{0};
    FunctionChatModel inner([&](const std::string&, const std::string&) {
        int now = ++current;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        --current;
        return std::string("ok");
    });
    BoundedChatModel bounded(inner, 2);
    std::vector<std::jthread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] { EXPECT_EQ(bounded.send("s", "u"), "ok"); });
    }
    threads.clear();
    EXPECT_LE(peak.load(), 2);
    EXPECT_GE(peak.load(), 1);
}

TEST(BoundedChat, ReleasesSlotOnThrow) {
    FunctionChatModel inner([](const std::string&, const std::string&) -> std::string {
        throw BackendError("x");
    });
    BoundedChatModel bounded(inner, 1);
    EXPECT_THROW(bounded.send("s", "u"), BackendError);
    EXPECT_THROW(bounded.send("s", "u"), BackendError);
}
