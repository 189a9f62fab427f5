#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "webkg/chat.hpp"
#include "webkg/generation.hpp"
#include "webkg/kg_store.hpp"

namespace webkg {

enum class Domain { finance, sports, music, movie, open };

std::string_view to_string(Domain d);
// Accepts the canonical names plus a few common variants ("sport", "movies").
std::optional<Domain> parse_domain(std::string_view text);

using CallParams = std::map<std::string, std::string>;

struct KgFunctionCall {
    std::string name;
    CallParams params;

    bool operator==(const KgFunctionCall&) const = default;
};

nlohmann::json to_json(const KgFunctionCall& call);

struct KgResult {
    bool found = false;
    nlohmann::json payload;  // null when not found
    std::vector<std::string> provenance;
    std::string note;  // validation or absence detail, informational only
};

nlohmann::json to_json(const KgResult& result);
KgResult kg_result_from_json(const nlohmann::json& j);

struct ParamSpec {
    std::string name;
    std::string description;
    bool required = true;
};

using KgHandler = std::function<KgResult(const KgStore&, const CallParams&)>;

struct FunctionSpec {
    std::string name;
    std::string description;
    Domain domain = Domain::open;
    std::vector<ParamSpec> params;
    KgHandler handler;
    KgFunctionCall example;  // shown in the function-calling prompt
};

// Looks up `entity_type` by the `name_param` value and returns the attribute
// named by `info_param` (spaces and hyphens read as underscores). Attributes
// missing on the entity fall back to relations with that predicate.
KgHandler attribute_lookup(std::string entity_type, std::string name_param,
                           std::string info_param);

class FunctionRegistry {
public:
    // Music artist/song/year families plus finance, sports and movie lookups.
    static FunctionRegistry with_defaults();

    // Throws ConfigError on a duplicate name or a spec without a handler.
    void add(FunctionSpec spec);

    const FunctionSpec* find(const std::string& name) const;
    std::vector<const FunctionSpec*> for_domain(Domain d) const;
    std::size_t size() const { return specs_.size(); }

private:
    std::vector<FunctionSpec> specs_;
};

// Tool definition in the OpenAI-style function schema, keys in display order.
nlohmann::ordered_json tool_schema(const FunctionSpec& spec);

// Empty string when the call satisfies `spec`, else the reason.
std::string validate_call(const FunctionSpec& spec, const KgFunctionCall& call);

// Runs a call against an in-memory store. Unknown functions and missing
// parameters yield found=false with a note; absence is never an error.
KgResult execute_call(const KgStore& store, const FunctionRegistry& registry,
                      const KgFunctionCall& call);

// Where function calls are executed: in process or via the mock KG service.
class KgBackend {
public:
    virtual ~KgBackend() = default;
    virtual KgResult call(const KgFunctionCall& call) = 0;
};

class LocalKgBackend final : public KgBackend {
public:
    LocalKgBackend(const KgStore& store, const FunctionRegistry& registry)
        : store_(store), registry_(registry) {}

    KgResult call(const KgFunctionCall& c) override { return execute_call(store_, registry_, c); }

private:
    const KgStore& store_;
    const FunctionRegistry& registry_;
};

const std::string& classification_system_prompt();

// Named domain only with stated certainty > 0.9; anything else is open.
Domain classify_domain(const std::string& query, ChatModel& model);
Domain parse_classification(std::string_view reply);

// Empty when the domain has no registered functions.
std::optional<Prompt> function_call_prompt(const std::string& query, Domain domain,
                                           const FunctionRegistry& registry);

// Accepts one {"name", "params"} object, a JSON list of them, or a Python
// style call `name(key="value", ...)`. Every call must name a function of
// `domain` and carry its required parameters, otherwise nothing is returned.
std::vector<KgFunctionCall> parse_function_calls(std::string_view reply, Domain domain,
                                                 const FunctionRegistry& registry);

std::vector<KgFunctionCall> generate_function_call(const std::string& query, Domain domain,
                                                   ChatModel& model,
                                                   const FunctionRegistry& registry);

// Outcome of one executed call list. A later call whose parameter value is
// "$prev" consumes the previous result; scalar payloads are substituted and
// scalar lists fan out into one call per element.
struct ChainResult {
    std::vector<KgResult> results;  // one per call
    std::vector<bool> consumed;     // feeds the next call
    std::vector<KgResult> final_results() const;
};

ChainResult execute_chain(std::span<const KgFunctionCall> calls, KgBackend& backend);

struct PostProcessConfig {
    std::string false_premise_response = "invalid question";
};

struct PostProcessOutcome {
    enum class Kind { answer, false_premise, no_answer };
    Kind kind = Kind::no_answer;
    std::string text;
    std::vector<std::string> rules;  // names of rules that fired, in order
};

// Ordered rule chain: temporal filtering against query_time, numerical
// reduction (count/sum/difference/average), logical comparison or membership
// across results, then false-premise detection on the filtered payload.
PostProcessOutcome post_process(std::span<const KgResult> results, const std::string& query,
                                const std::string& query_time,
                                const PostProcessConfig& cfg = {});

// Text form of a payload for answers and prompt references.
std::string render_payload(const nlohmann::json& payload);

struct KgOutcome {
    Domain domain = Domain::open;
    std::vector<KgFunctionCall> calls;
    std::vector<KgResult> results;
    std::optional<std::string> answer;  // set only when the chain fully resolved
    bool false_premise = false;
    std::string evidence;  // rendered found payloads, for use as a reference
    std::vector<std::string> provenance;
    ConfidenceTier confidence = ConfidenceTier::high;
};

// classify -> generate call -> execute -> post-process. Pass `domain` to skip
// classification when the caller already ran it.
KgOutcome kg_answer(const std::string& query, const std::string& query_time, ChatModel& model,
                    KgBackend& backend, const FunctionRegistry& registry,
                    const PostProcessConfig& cfg = {}, std::optional<Domain> domain = {});

}  // namespace webkg
