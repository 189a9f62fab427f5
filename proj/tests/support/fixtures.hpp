#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "webkg/chat.hpp"
#include "webkg/config.hpp"
#include "webkg/corpus.hpp"
#include "webkg/dataset.hpp"
#include "webkg/kg_store.hpp"

namespace webkg::test {

std::string data_dir();

// Uniform in [0, n); fixed across standard libraries.
std::size_t pick(std::mt19937_64& rng, std::size_t n);

std::vector<std::string> filler_words(std::mt19937_64& rng, std::size_t n);
std::string paragraphs_html(const std::vector<std::string>& paragraphs);
std::string join_words(const std::vector<std::string>& words);

// Pages whose bodies draw from the synthetic vocabulary w0..w{vocab-1}.
std::vector<Page> random_pages(std::mt19937_64& rng, std::size_t pages, std::size_t max_tokens,
                               std::size_t vocab);

struct SentinelCase {
    std::vector<Page> pages;
    std::string query;
    std::string fact;
    std::size_t page_index = 0;
};

// One unique fact planted in one of `page_count` filler pages, with decoy
// sentences sharing some of the query's words on other pages.
SentinelCase sentinel_case(std::uint64_t seed, std::size_t page_count = 50);

KgStore fixture_store();

nlohmann::json record_json(const Record& r);
void write_jsonl(const std::string& path, const std::vector<Record>& records);

using ReplyFn = std::function<std::string(const std::string& system, const std::string& user)>;

// Answers through `fn` and remembers every exchange as a replay entry.
class RecordingChatModel final : public ChatModel {
public:
    explicit RecordingChatModel(ReplyFn fn) : fn_(std::move(fn)) {}
    std::string send(const std::string& system, const std::string& user) override;
    using ChatModel::send;
    ScriptedChatModel& replay() { return replay_; }

private:
    ReplyFn fn_;
    std::mutex mu_;
    ScriptedChatModel replay_;
};

// "Question: ..." line of an answer prompt.
std::string question_of(const std::string& user);

struct EvalFixture {
    std::string dir;
    std::string dataset;
    std::string config;
    std::string replay;
    std::vector<Record> records;
};

// 60 open-domain questions with a scripted answer set cycling through
// (right, wrong) x (high, medium, low). KG disabled.
EvalFixture write_gate_sweep_fixture(const std::string& dir);

// 20 mixed records: KG-answered static music questions, real-time finance and
// fast-changing sports questions, a false premise, and web-only questions.
// The replay covers every prompt at chunk sizes 300, 500, 750 and 1000.
EvalFixture write_e2e_fixture(const std::string& dir);

std::string read_file(const std::string& path);

}  // namespace webkg::test
