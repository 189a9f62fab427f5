#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "webkg/chat.hpp"
#include "webkg/generation.hpp"
#include "webkg/instrumentation.hpp"
#include "webkg/kg_workflow.hpp"
#include "webkg/retrieval_pipeline.hpp"

namespace webkg {

enum class Dynamism { static_, slow_changing, fast_changing, real_time };

std::string_view to_string(Dynamism d);
// "static", "slow-changing", "fast-changing", "real-time"; '_' works for '-'.
std::optional<Dynamism> parse_dynamism(std::string_view text);

struct DomainProfile {
    Domain domain = Domain::open;
    Dynamism default_dynamism = Dynamism::static_;
    bool kg_priority = true;
    // How often the domain's KG store file should be reloaded.
    std::chrono::hours refresh_interval{24 * 30};
};

using DomainProfiles = std::map<Domain, DomainProfile>;

// open: static; music, movie: slow-changing; sports: fast-changing;
// finance: real-time.
DomainProfiles default_profiles();

// Throws ConfigError when a static or slow-changing profile disables KG priority.
void validate_profiles(const DomainProfiles& profiles);

bool store_refresh_due(const DomainProfile& profile,
                       std::chrono::system_clock::time_point loaded_at,
                       std::chrono::system_clock::time_point now);

Dynamism resolve_dynamism(std::optional<Dynamism> record, Domain domain,
                          const DomainProfiles& profiles);

inline constexpr std::string_view kKnowledgeGraphLabel = "[knowledge graph]";

struct RouterConfig {
    ConfidenceTier threshold = ConfidenceTier::high;
    bool kg_enabled = true;
    PostProcessConfig post;
    DomainProfiles profiles = default_profiles();
};

struct QueryInput {
    std::string query;
    std::string query_time;
    std::span<const Page> pages;
    std::optional<Dynamism> dynamism;
};

enum class RoutePath { kg, web, kg_and_web };
std::string_view to_string(RoutePath p);

struct RouteOutcome {
    std::string answer;
    RoutePath path = RoutePath::web;
    Domain domain = Domain::open;
    Dynamism dynamism = Dynamism::static_;
    std::optional<KgOutcome> kg;
    std::string kg_error;  // set when the KG side failed and was skipped
    std::optional<GatedAnswer> web;
    std::vector<Reference> references;
    std::size_t corpus_chunks = 0;
    std::size_t stage1_candidates = 0;
    std::size_t stage2_candidates = 0;
};

// Optional KG side of the router. All references must outlive the Router.
struct KgComponents {
    ChatModel& model;
    KgBackend& backend;
    const FunctionRegistry& registry;
};

// Combines the KG workflow and the web RAG workflow per question dynamism.
// Static and slow-changing questions return a KG answer without touching the
// web path; fast-changing and real-time ones always run the web path with
// the KG result as an extra reference.
class Router {
public:
    Router(RouterConfig cfg, const RetrievalPipeline& retrieval, ChatModel& answer_model,
           std::optional<KgComponents> kg, Instrumentation* instr = nullptr);

    RouteOutcome route(const QueryInput& input) const;

    const RouterConfig& config() const { return cfg_; }

private:
    RouterConfig cfg_;
    const RetrievalPipeline& retrieval_;
    ChatModel& answer_model_;
    std::optional<KgComponents> kg_;
    Instrumentation* instr_;
};

}  // namespace webkg
