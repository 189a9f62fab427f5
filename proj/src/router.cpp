#include "webkg/router.hpp"

#include "webkg/error.hpp"
#include "webkg/strings.hpp"

namespace webkg {

std::string_view to_string(Dynamism d) {
    switch (d) {
        case Dynamism::static_:
            return "static";
        case Dynamism::slow_changing:
            return "slow-changing";
        case Dynamism::fast_changing:
            return "fast-changing";
        case Dynamism::real_time:
            return "real-time";
    }
    return "static";
}

std::optional<Dynamism> parse_dynamism(std::string_view text) {
    auto s = canonicalize(text);
    for (auto& c : s) {
        if (c == '_' || c == ' ') {
            c = '-';
        }
    }
    if (s == "static") {
        return Dynamism::static_;
    }
    if (s == "slow-changing") {
        return Dynamism::slow_changing;
    }
    if (s == "fast-changing") {
        return Dynamism::fast_changing;
    }
    if (s == "real-time" || s == "realtime") {
        return Dynamism::real_time;
    }
    return std::nullopt;
}

std::string_view to_string(RoutePath p) {
    switch (p) {
        case RoutePath::kg:
            return "kg";
        case RoutePath::web:
            return "web";
        case RoutePath::kg_and_web:
            return "kg+web";
    }
    return "web";
}

DomainProfiles default_profiles() {
    using std::chrono::hours;
    return {
        {Domain::open, {Domain::open, Dynamism::static_, true, hours(24 * 90)}},
        {Domain::music, {Domain::music, Dynamism::slow_changing, true, hours(24 * 7)}},
        {Domain::movie, {Domain::movie, Dynamism::slow_changing, true, hours(24 * 7)}},
        {Domain::sports, {Domain::sports, Dynamism::fast_changing, false, hours(24)}},
        {Domain::finance, {Domain::finance, Dynamism::real_time, false, hours(1)}},
    };
}

void validate_profiles(const DomainProfiles& profiles) {
    for (const auto& [domain, p] : profiles) {
        if (p.domain != domain) {
            throw ConfigError("router profile keyed '" + std::string(to_string(domain)) +
                              "' describes domain '" + std::string(to_string(p.domain)) + "'");
        }
        bool stable = p.default_dynamism == Dynamism::static_ ||
                      p.default_dynamism == Dynamism::slow_changing;
        if ((stable || domain == Domain::open) && !p.kg_priority) {
            throw ConfigError("router profile '" + std::string(to_string(domain)) +
                              "' is static/slow-changing or open and must keep kg_priority");
        }
        if (p.refresh_interval.count() <= 0) {
            throw ConfigError("router profile '" + std::string(to_string(domain)) +
                              "' needs a positive refresh interval");
        }
    }
}

bool store_refresh_due(const DomainProfile& profile,
                       std::chrono::system_clock::time_point loaded_at,
                       std::chrono::system_clock::time_point now) {
    return now - loaded_at >= profile.refresh_interval;
}

Dynamism resolve_dynamism(std::optional<Dynamism> record, Domain domain,
                          const DomainProfiles& profiles) {
    if (record) {
        return *record;
    }
    if (auto it = profiles.find(domain); it != profiles.end()) {
        return it->second.default_dynamism;
    }
    return default_profiles().at(domain).default_dynamism;
}

Router::Router(RouterConfig cfg, const RetrievalPipeline& retrieval, ChatModel& answer_model,
               std::optional<KgComponents> kg, Instrumentation* instr)
    : cfg_(std::move(cfg)),
      retrieval_(retrieval),
      answer_model_(answer_model),
      kg_(kg),
      instr_(instr) {
    validate_profiles(cfg_.profiles);
}

RouteOutcome Router::route(const QueryInput& input) const {
    RouteOutcome out;
    if (cfg_.kg_enabled && kg_) {
        bump(instr_, &Instrumentation::kg_runs);
        try {
            out.domain = classify_domain(input.query, kg_->model);
            out.kg = kg_answer(input.query, input.query_time, kg_->model, kg_->backend,
                               kg_->registry, cfg_.post, out.domain);
        } catch (const BackendError& e) {
            out.kg_error = e.what();
            out.kg.reset();
        }
    }
    out.dynamism = resolve_dynamism(input.dynamism, out.domain, cfg_.profiles);

    const bool kg_answered = out.kg && out.kg->answer;
    const bool kg_first =
        out.dynamism == Dynamism::static_ || out.dynamism == Dynamism::slow_changing;
    if (kg_answered && kg_first) {
        out.answer = *out.kg->answer;
        out.path = RoutePath::kg;
        return out;
    }

    std::vector<Reference> kg_refs;
    if (out.kg) {
        std::string kg_text;
        if (out.dynamism == Dynamism::fast_changing || out.dynamism == Dynamism::real_time) {
            kg_text = (kg_answered && !out.kg->false_premise) ? *out.kg->answer : out.kg->evidence;
        } else if (out.dynamism == Dynamism::slow_changing) {
            kg_text = out.kg->evidence;
        }
        if (!kg_text.empty()) {
            Reference ref;
            ref.label = std::string(kKnowledgeGraphLabel);
            ref.text = std::move(kg_text);
            kg_refs.push_back(std::move(ref));
        }
    }

    auto retrieval = retrieval_.retrieve(input.query, input.pages);
    out.corpus_chunks = retrieval.corpus.size();
    out.stage1_candidates = retrieval.stage1.size();
    out.stage2_candidates = retrieval.stage2.size();
    out.references = std::move(kg_refs);
    for (auto& r : retrieval.references) {
        out.references.push_back(std::move(r));
    }
    bump(instr_, &Instrumentation::web_generations);
    out.web = generate_answer(input.query, input.query_time, out.references, answer_model_,
                              cfg_.threshold);
    out.answer = out.web->final_text;
    out.path = out.references.empty() || out.references.front().label != kKnowledgeGraphLabel
                   ? RoutePath::web
                   : RoutePath::kg_and_web;
    return out;
}

}  // namespace webkg
