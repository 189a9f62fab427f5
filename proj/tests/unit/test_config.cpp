#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "webkg/config.hpp"
#include "webkg/error.hpp"

using namespace webkg;
using nlohmann::json;

TEST(Config, Defaults) {
    auto c = parse_config(json::object());
    EXPECT_EQ(c.retrieval.k_stage1, 200u);
    EXPECT_EQ(c.retrieval.m_sparse, 5u);
    EXPECT_EQ(c.retrieval.n_dense, 20u);
    EXPECT_EQ(c.threshold, ConfidenceTier::high);
    EXPECT_EQ(c.worker_count, 4u);
    EXPECT_TRUE(c.kg_enabled);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesNestedKeys) {
    auto c = parse_config({{"retrieval",
                            {{"k_stage1", 120},
                             {"m_sparse", 10},
                             {"n_dense", 20},
                             {"bm25", {{"k1", 1.2}, {"b", 0.5}}},
                             {"chunking", {{"chunk_size", 300}, {"overlap", 20}}}}},
                           {"threshold", "medium"},
                           {"backends", {{"chat", {{"url", "http://h:1/chat"}, {"timeout_ms", 500}}}}},
                           {"router", {{"profiles", {{"sports", {{"dynamism", "real-time"}}}}}}},
                           {"worker_count", 2},
                           {"seed", 9}});
    EXPECT_EQ(c.retrieval.k_stage1, 120u);
    EXPECT_DOUBLE_EQ(c.retrieval.bm25.k1, 1.2);
    EXPECT_EQ(c.retrieval.chunking.chunk_size, 300u);
    EXPECT_EQ(c.threshold, ConfidenceTier::medium);
    EXPECT_EQ(c.chat.url, "http://h:1/chat");
    EXPECT_EQ(c.chat.timeout_ms, 500);
    EXPECT_EQ(c.profiles.at(Domain::sports).default_dynamism, Dynamism::real_time);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsUnknownKeys) {
    try {
        parse_config({{"retrieval", {{"k_stage_one", 5}}}});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("retrieval.k_stage_one"), std::string::npos);
    }
    EXPECT_THROW(parse_config({{"colour", "red"}}), ConfigError);
    EXPECT_THROW(parse_config({{"threshold", "extreme"}}), ConfigError);
    EXPECT_THROW(parse_config({{"worker_count", -1}}), ConfigError);
    EXPECT_THROW(parse_config({{"kg_enabled", "yes"}}), ConfigError);
}

TEST(Config, Invariants) {
    auto small_k = parse_config({{"retrieval", {{"k_stage1", 99}}}});
    EXPECT_THROW(small_k.validate(), ConfigError);
    auto exact_k = parse_config({{"retrieval", {{"k_stage1", 100}}}});
    EXPECT_NO_THROW(exact_k.validate());
    auto overlap = parse_config({{"retrieval", {{"chunking", {{"chunk_size", 10}, {"overlap", 10}}}}}});
    EXPECT_THROW(overlap.validate(), ConfigError);
    auto workers = parse_config({{"worker_count", 0}});
    EXPECT_THROW(workers.validate(), ConfigError);
    auto profile = parse_config({{"router", {{"profiles", {{"open", {{"kg_priority", false}}}}}}}});
    EXPECT_THROW(profile.validate(), ConfigError);
}

TEST(Config, RelativePathsAndEnv) {
    auto dir = std::filesystem::temp_directory_path() / "webkg_config_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "c.json").string();
    std::ofstream(path) << R"({"kg_store_path": "store.jsonl", "backends": {"chat": {"script": "r.jsonl"}}})";
    ::setenv("WEBKG_JUDGE_URL", "http://judge:9/j", 1);
    auto c = load_config(path);
    ::unsetenv("WEBKG_JUDGE_URL");
    EXPECT_EQ(std::filesystem::path(c.kg_store_path), dir / "store.jsonl");
    EXPECT_EQ(std::filesystem::path(c.chat.script), dir / "r.jsonl");
    EXPECT_EQ(c.judge.url, "http://judge:9/j");
    EXPECT_THROW(load_config((dir / "absent.json").string()), ConfigError);
    auto bad = (dir / "bad.json").string();
    std::ofstream(bad) << "{";
    EXPECT_THROW(load_config(bad), ConfigError);
}
