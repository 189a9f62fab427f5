#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "webkg/chat.hpp"
#include "webkg/config.hpp"
#include "webkg/dataset.hpp"
#include "webkg/dense_retrieval.hpp"
#include "webkg/eval.hpp"
#include "webkg/instrumentation.hpp"
#include "webkg/kg_store.hpp"
#include "webkg/kg_workflow.hpp"
#include "webkg/router.hpp"

namespace webkg {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitBackend = 3 };

// Backends and KG pieces built once from an AppConfig and shared read-only by
// every query of a command.
class Runtime {
public:
    explicit Runtime(const AppConfig& cfg);

    const AppConfig& config() const { return cfg_; }
    Embedder& embedder() { return *embedder_; }
    Reranker& reranker() { return *reranker_; }
    ChatModel& chat() { return *chat_; }
    ChatModel* judge() { return judge_.get(); }
    Instrumentation& instrumentation() { return instr_; }

    // Empty when KG is disabled or neither a store nor a service is configured.
    std::optional<KgComponents> kg();

    RouterConfig router_config(ConfidenceTier threshold) const;

private:
    AppConfig cfg_;
    std::unique_ptr<Embedder> embedder_;
    std::unique_ptr<Reranker> reranker_;
    std::unique_ptr<ChatModel> chat_inner_;
    std::unique_ptr<ChatModel> chat_;
    std::unique_ptr<ChatModel> judge_inner_;
    std::unique_ptr<ChatModel> judge_;
    std::unique_ptr<KgStore> store_;
    FunctionRegistry registry_;
    std::unique_ptr<KgBackend> kg_backend_;
    Instrumentation instr_;
};

struct AskOptions {
    std::string pages_file;
    std::optional<std::string> query;       // defaults to the record's query
    std::optional<std::string> query_time;  // defaults to the record's query_time
    std::optional<ConfidenceTier> threshold;
    bool verbose = false;
};

// Prints the answer; with `verbose`, a trace of path, candidate counts and
// confidence follows. Returns an ExitCode.
int cmd_ask(const AppConfig& cfg, const AskOptions& opts, std::ostream& out, std::ostream& err);

struct EvalOptions {
    std::string dataset;
    std::optional<std::size_t> sample;
    std::optional<std::uint64_t> seed;  // overrides the config seed
    std::optional<ConfidenceTier> threshold;
    bool sweep_thresholds = false;         // one run per tier: low, medium, high
    std::vector<std::size_t> chunk_sizes;  // one run per size; empty keeps the config value
    std::string report_path;               // JSON report; a .txt table is written beside it
    bool verbose = false;
};

// Indices of `count` records drawn without replacement, ascending. The draw
// depends only on (total, count, seed).
std::vector<std::size_t> sample_indices(std::size_t total, std::size_t count, std::uint64_t seed);

struct EvalOutput {
    std::vector<RunReport> runs;
    std::string first_column;
    nlohmann::ordered_json report;
    std::string table;
};

// Throws ConfigError, DataError. Per-record backend failures are recorded in
// the run and do not abort it.
EvalOutput run_eval(const AppConfig& cfg, const EvalOptions& opts);

int cmd_eval(const AppConfig& cfg, const EvalOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace webkg
