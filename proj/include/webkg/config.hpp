#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "webkg/generation.hpp"
#include "webkg/retrieval_pipeline.hpp"
#include "webkg/router.hpp"

namespace webkg {

struct BackendConfig {
    std::string url;     // empty: use the built-in or scripted implementation
    int timeout_ms = 30000;
    std::string script;  // chat/judge only: replay file of canned replies
    std::ptrdiff_t max_in_flight = 8;
};

struct AppConfig {
    RetrievalConfig retrieval;
    ConfidenceTier threshold = ConfidenceTier::high;
    BackendConfig chat;
    BackendConfig embedding;
    BackendConfig rerank;
    BackendConfig judge;
    BackendConfig kg;  // url points at a mock KG service's /call endpoint
    std::size_t embedding_dimension = 256;
    std::string kg_store_path;
    bool kg_enabled = true;
    std::string false_premise_response = "invalid question";
    bool false_premise_as_missing = false;
    DomainProfiles profiles = default_profiles();
    std::size_t worker_count = 4;
    std::uint64_t seed = 42;

    // Throws ConfigError naming the first violated constraint.
    void validate() const;
};

// Relative paths are resolved against `base_dir`. Unknown keys are rejected.
AppConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");

// Empty path gives defaults. Applies environment overrides, then validates.
AppConfig load_config(const std::string& path);

// WEBKG_CHAT_URL, WEBKG_EMBEDDING_URL, WEBKG_RERANK_URL, WEBKG_JUDGE_URL,
// WEBKG_KG_URL replace the corresponding backend URLs when set.
void apply_env_overrides(AppConfig& cfg);

}  // namespace webkg
