#include "webkg/kg_workflow.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "webkg/error.hpp"
#include "webkg/strings.hpp"

namespace webkg {

std::string_view to_string(Domain d) {
    switch (d) {
        case Domain::finance:
            return "finance";
        case Domain::sports:
            return "sports";
        case Domain::music:
            return "music";
        case Domain::movie:
            return "movie";
        case Domain::open:
            return "open";
    }
    return "open";
}

std::optional<Domain> parse_domain(std::string_view text) {
    auto s = canonicalize(text);
    if (s == "finance" || s == "financial") {
        return Domain::finance;
    }
    if (s == "sports" || s == "sport") {
        return Domain::sports;
    }
    if (s == "music") {
        return Domain::music;
    }
    if (s == "movie" || s == "movies") {
        return Domain::movie;
    }
    if (s == "open") {
        return Domain::open;
    }
    return std::nullopt;
}

nlohmann::json to_json(const KgFunctionCall& call) {
    return {{"name", call.name}, {"params", call.params}};
}

nlohmann::json to_json(const KgResult& result) {
    nlohmann::json j{{"found", result.found},
                     {"payload", result.payload},
                     {"provenance", result.provenance}};
    if (!result.note.empty()) {
        j["note"] = result.note;
    }
    return j;
}

KgResult kg_result_from_json(const nlohmann::json& j) {
    KgResult r;
    r.found = j.at("found").get<bool>();
    r.payload = j.value("payload", nlohmann::json());
    r.provenance = j.value("provenance", std::vector<std::string>{});
    r.note = j.value("note", std::string());
    if (!r.found) {
        r.payload = nullptr;
    }
    return r;
}

namespace {

std::string attribute_key(const std::string& raw) {
    auto key = canonicalize(raw);
    std::replace(key.begin(), key.end(), ' ', '_');
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

KgResult not_found(std::string note) {
    KgResult r;
    r.note = std::move(note);
    return r;
}

}  // namespace

KgHandler attribute_lookup(std::string entity_type, std::string name_param,
                           std::string info_param) {
    return [entity_type = std::move(entity_type), name_param = std::move(name_param),
            info_param = std::move(info_param)](const KgStore& store, const CallParams& params) {
        const auto& name = params.at(name_param);
        const auto* entity = store.find(entity_type, name);
        if (entity == nullptr) {
            return not_found("no " + entity_type + " named '" + canonicalize(name) + "'");
        }
        auto key = attribute_key(params.at(info_param));
        KgResult r;
        if (auto it = entity->attributes.find(key); it != entity->attributes.end()) {
            r.found = true;
            r.payload = *it;
            r.provenance = {entity->name};
            return r;
        }
        auto objects = store.related(entity->name, key);
        if (!objects.empty()) {
            r.found = true;
            r.payload = objects;
            r.provenance = {entity->name};
            return r;
        }
        return not_found(entity_type + " '" + entity->name + "' has no " + key);
    };
}

namespace {

FunctionSpec lookup_spec(std::string name, std::string description, Domain domain,
                         std::string entity_type, std::string name_param,
                         std::string name_description, std::string info_param,
                         std::string info_description, KgFunctionCall example) {
    FunctionSpec spec;
    spec.name = std::move(name);
    spec.description = std::move(description);
    spec.domain = domain;
    spec.params = {{name_param, std::move(name_description), true},
                   {info_param, std::move(info_description), true}};
    spec.handler = attribute_lookup(std::move(entity_type), name_param, info_param);
    spec.example = std::move(example);
    return spec;
}

}  // namespace

FunctionRegistry FunctionRegistry::with_defaults() {
    FunctionRegistry reg;
    reg.add(lookup_spec(
        "get_artist_info",
        "Useful for when you need to get information about an artist, such as singer, band",
        Domain::music, "artist", "artist_name", "the name of artist or band",
        "artist_information",
        "the kind of artist information, such as birthplace, birthday, lifespan, all_works, "
        "grammy_count, grammy_year, band_members",
        {"get_artist_info", {{"artist_name", "justin bieber"}, {"artist_information", "birthday"}}}));
    reg.add(lookup_spec(
        "get_song_info", "Useful for when you need to get information about a song",
        Domain::music, "song", "song_name", "the name of the song", "song_information",
        "the kind of song information, such as author, release_date, release_country, "
        "grammy_award_count, grammy_award_date",
        {"get_song_info", {{"song_name", "shape of you"}, {"song_information", "author"}}}));
    reg.add(lookup_spec(
        "get_year_info",
        "Useful for when you need to get music award or chart information about a year",
        Domain::music, "year", "year", "the year, such as 2020", "year_information",
        "the kind of year information, such as grammy_best_new_artist, grammy_best_album, "
        "grammy_best_song, billboard_top_song",
        {"get_year_info", {{"year", "2020"}, {"year_information", "grammy_best_new_artist"}}}));
    reg.add(lookup_spec(
        "get_company_info",
        "Useful for when you need to get information about a listed company or its stock",
        Domain::finance, "company", "company_name", "the company name or ticker symbol",
        "company_information",
        "the kind of company information, such as ticker, market_cap, pe_ratio, eps, "
        "dividends, price_history",
        {"get_company_info", {{"company_name", "funko"}, {"company_information", "price_history"}}}));
    reg.add(lookup_spec(
        "get_team_info", "Useful for when you need to get information about a sports team",
        Domain::sports, "team", "team_name", "the name of the team", "team_information",
        "the kind of team information, such as league, arena, championships, roster, games",
        {"get_team_info", {{"team_name", "boston celtics"}, {"team_information", "championships"}}}));
    reg.add(lookup_spec(
        "get_movie_info", "Useful for when you need to get information about a movie",
        Domain::movie, "movie", "movie_name", "the title of the movie", "movie_information",
        "the kind of movie information, such as release_date, budget, revenue, director, cast, "
        "oscar_awards, genres",
        {"get_movie_info", {{"movie_name", "inception"}, {"movie_information", "director"}}}));
    reg.add(lookup_spec(
        "get_person_info",
        "Useful for when you need to get information about an actor, director or other film "
        "person",
        Domain::movie, "person", "person_name", "the name of the person", "person_information",
        "the kind of person information, such as birthday, acted_movies, directed_movies, "
        "oscar_awards",
        {"get_person_info", {{"person_name", "christopher nolan"}, {"person_information", "birthday"}}}));
    return reg;
}

void FunctionRegistry::add(FunctionSpec spec) {
    if (spec.name.empty() || !spec.handler) {
        throw ConfigError("function spec needs a name and a handler");
    }
    if (find(spec.name) != nullptr) {
        throw ConfigError("function '" + spec.name + "' is already registered");
    }
    specs_.push_back(std::move(spec));
}

const FunctionSpec* FunctionRegistry::find(const std::string& name) const {
    auto it = std::find_if(specs_.begin(), specs_.end(),
                           [&](const FunctionSpec& s) { return s.name == name; });
    return it == specs_.end() ? nullptr : &*it;
}

std::vector<const FunctionSpec*> FunctionRegistry::for_domain(Domain d) const {
    std::vector<const FunctionSpec*> out;
    for (const auto& s : specs_) {
        if (s.domain == d) {
            out.push_back(&s);
        }
    }
    return out;
}

nlohmann::ordered_json tool_schema(const FunctionSpec& spec) {
    nlohmann::ordered_json properties = nlohmann::ordered_json::object();
    nlohmann::ordered_json required = nlohmann::ordered_json::array();
    for (const auto& p : spec.params) {
        properties[p.name] = {{"type", "string"}, {"description", p.description}};
        if (p.required) {
            required.push_back(p.name);
        }
    }
    return {{"type", "function"},
            {"function",
             {{"name", spec.name},
              {"description", spec.description},
              {"parameters",
               {{"type", "object"}, {"properties", properties}, {"required", required}}}}}};
}

std::string validate_call(const FunctionSpec& spec, const KgFunctionCall& call) {
    if (call.name != spec.name) {
        return "call names '" + call.name + "', spec is '" + spec.name + "'";
    }
    for (const auto& p : spec.params) {
        if (!p.required) {
            continue;
        }
        auto it = call.params.find(p.name);
        if (it == call.params.end() || trim(it->second).empty()) {
            return "missing required parameter '" + p.name + "'";
        }
    }
    return {};
}

KgResult execute_call(const KgStore& store, const FunctionRegistry& registry,
                      const KgFunctionCall& call) {
    const auto* spec = registry.find(call.name);
    if (spec == nullptr) {
        return not_found("unknown function '" + call.name + "'");
    }
    if (auto problem = validate_call(*spec, call); !problem.empty()) {
        return not_found(problem);
    }
    auto r = spec->handler(store, call.params);
    if (!r.found) {
        r.payload = nullptr;
    }
    return r;
}

const std::string& classification_system_prompt() {
    static const std::string kPrompt =
        "You are a question classifier. Categorize the question into exactly one of these "
        "domains: finance, sports, music, movie, open.\n"
        "Choose finance, sports, music or movie only when you are more than 90% certain; "
        "otherwise choose open.\n"
        "Output the result in JSON format with the domain and your certainty as a number "
        "between 0 and 1, for example output: {\"domain\": \"music\", \"certainty\": 0.95}";
    return kPrompt;
}

Domain parse_classification(std::string_view reply) {
    auto j = find_json(reply, [](const nlohmann::json& v) {
        return v.is_object() && v.contains("domain") && v["domain"].is_string() &&
               v.contains("certainty");
    });
    if (!j) {
        return Domain::open;
    }
    auto domain = parse_domain((*j)["domain"].get<std::string>());
    const auto& c = (*j)["certainty"];
    double certainty = -1.0;
    if (c.is_number()) {
        certainty = c.get<double>();
    } else if (c.is_string()) {
        try {
            certainty = std::stod(c.get<std::string>());
        } catch (const std::exception&) {
            certainty = -1.0;
        }
    }
    if (!domain || *domain == Domain::open || !(certainty > 0.9 && certainty <= 1.0)) {
        return Domain::open;
    }
    return *domain;
}

Domain classify_domain(const std::string& query, ChatModel& model) {
    return parse_classification(model.send(classification_system_prompt(), query));
}

std::optional<Prompt> function_call_prompt(const std::string& query, Domain domain,
                                           const FunctionRegistry& registry) {
    auto specs = registry.for_domain(domain);
    if (specs.empty()) {
        return std::nullopt;
    }
    std::string system =
        "You are an AI agent of linguist talking to a human. For all questions you MUST use "
        "one of the functions provided.\n"
        "You have access to the following tools:\n";
    for (const auto* spec : specs) {
        system += tool_schema(*spec).dump(4);
        system += '\n';
    }
    system +=
        "To use these tools you must always respond in a Python function call based on the "
        "above provided function definition of the tool!\n"
        "For example:\n";
    system += to_json(specs.front()->example).dump();
    system +=
        "\nIf the question needs several lookups, respond with a JSON list of such calls in "
        "order; a later call may use \"$prev\" as a parameter value to refer to the result of "
        "the call before it.";
    return Prompt{std::move(system), query};
}

namespace {

std::optional<CallParams> params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        return std::nullopt;
    }
    CallParams out;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            out[key] = value.get<std::string>();
        } else if (value.is_number() || value.is_boolean()) {
            out[key] = value.dump();
        } else {
            return std::nullopt;
        }
    }
    return out;
}

bool is_call_object(const nlohmann::json& j) {
    return j.is_object() && j.contains("name") && j["name"].is_string() &&
           j.contains("params") && j["params"].is_object();
}

std::vector<KgFunctionCall> calls_from_json(const nlohmann::json& j) {
    std::vector<KgFunctionCall> calls;
    auto one = [&](const nlohmann::json& obj) {
        auto params = params_from_json(obj["params"]);
        if (!params) {
            return false;
        }
        calls.push_back({obj["name"].get<std::string>(), std::move(*params)});
        return true;
    };
    if (j.is_array()) {
        for (const auto& item : j) {
            if (!is_call_object(item) || !one(item)) {
                return {};
            }
        }
    } else if (!one(j)) {
        return {};
    }
    return calls;
}

std::vector<KgFunctionCall> python_style_calls(std::string_view reply,
                                               const std::set<std::string>& names) {
    static const std::regex kCall(R"(([A-Za-z_]\w*)\s*\(([^()]*)\))");
    static const std::regex kArg(
        R"re((\w+)\s*=\s*(?:"((?:[^"\\]|\\.)*)"|'((?:[^'\\]|\\.)*)'|([-\w.$]+)))re");
    std::string text(reply);
    std::vector<KgFunctionCall> calls;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kCall);
         it != std::sregex_iterator(); ++it) {
        auto name = (*it)[1].str();
        if (names.count(name) == 0) {
            continue;
        }
        KgFunctionCall call{name, {}};
        auto args = (*it)[2].str();
        for (auto a = std::sregex_iterator(args.begin(), args.end(), kArg);
             a != std::sregex_iterator(); ++a) {
            std::string value;
            for (int g = 2; g <= 4; ++g) {
                if ((*a)[g].matched) {
                    value = (*a)[g].str();
                    break;
                }
            }
            call.params[(*a)[1].str()] = value;
        }
        calls.push_back(std::move(call));
    }
    return calls;
}

}  // namespace

std::vector<KgFunctionCall> parse_function_calls(std::string_view reply, Domain domain,
                                                 const FunctionRegistry& registry) {
    auto specs = registry.for_domain(domain);
    std::set<std::string> names;
    for (const auto* s : specs) {
        names.insert(s->name);
    }
    if (names.empty()) {
        return {};
    }

    std::vector<KgFunctionCall> calls;
    auto j = find_json(reply, [](const nlohmann::json& v) {
        if (v.is_array()) {
            return !v.empty() && std::all_of(v.begin(), v.end(), is_call_object);
        }
        return is_call_object(v);
    });
    if (j) {
        calls = calls_from_json(*j);
    } else {
        calls = python_style_calls(reply, names);
    }
    if (calls.empty()) {
        return {};
    }
    for (const auto& call : calls) {
        if (names.count(call.name) == 0) {
            return {};
        }
        if (!validate_call(*registry.find(call.name), call).empty()) {
            return {};
        }
    }
    return calls;
}

std::vector<KgFunctionCall> generate_function_call(const std::string& query, Domain domain,
                                                   ChatModel& model,
                                                   const FunctionRegistry& registry) {
    auto prompt = function_call_prompt(query, domain, registry);
    if (!prompt) {
        return {};
    }
    return parse_function_calls(model.send(*prompt), domain, registry);
}

std::vector<KgResult> ChainResult::final_results() const {
    std::vector<KgResult> out;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!consumed[i]) {
            out.push_back(results[i]);
        }
    }
    return out;
}

namespace {

constexpr std::string_view kPrev = "$prev";

bool uses_prev(const KgFunctionCall& call) {
    return std::any_of(call.params.begin(), call.params.end(), [](const auto& kv) {
        return kv.second.find(kPrev) != std::string::npos;
    });
}

KgFunctionCall substitute(const KgFunctionCall& call, const std::string& value) {
    KgFunctionCall out = call;
    for (auto& [key, v] : out.params) {
        std::size_t pos;
        while ((pos = v.find(kPrev)) != std::string::npos) {
            v.replace(pos, kPrev.size(), value);
        }
    }
    return out;
}

std::optional<std::string> scalar_text(const nlohmann::json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number() || v.is_boolean()) {
        return v.dump();
    }
    return std::nullopt;
}

}  // namespace

ChainResult execute_chain(std::span<const KgFunctionCall> calls, KgBackend& backend) {
    ChainResult chain;
    chain.results.reserve(calls.size());
    chain.consumed.assign(calls.size(), false);
    for (std::size_t i = 0; i < calls.size(); ++i) {
        const auto& call = calls[i];
        if (!uses_prev(call)) {
            chain.results.push_back(backend.call(call));
            continue;
        }
        if (i == 0) {
            chain.results.push_back(not_found("$prev used by the first call"));
            continue;
        }
        chain.consumed[i - 1] = true;
        const auto& prev = chain.results[i - 1];
        if (!prev.found) {
            chain.results.push_back(not_found("previous call found nothing"));
            continue;
        }
        std::vector<std::string> values;
        if (auto s = scalar_text(prev.payload)) {
            values.push_back(*s);
        } else if (prev.payload.is_array()) {
            for (const auto& item : prev.payload) {
                auto s2 = scalar_text(item);
                if (!s2) {
                    values.clear();
                    break;
                }
                values.push_back(*s2);
            }
        }
        if (values.empty()) {
            chain.results.push_back(not_found("previous payload cannot be substituted"));
            continue;
        }
        if (values.size() == 1) {
            chain.results.push_back(backend.call(substitute(call, values.front())));
            continue;
        }
        KgResult merged;
        merged.payload = nlohmann::json::array();
        for (const auto& v : values) {
            auto r = backend.call(substitute(call, v));
            if (!r.found) {
                continue;
            }
            merged.found = true;
            merged.payload.push_back(r.payload);
            for (auto& p : r.provenance) {
                if (std::find(merged.provenance.begin(), merged.provenance.end(), p) ==
                    merged.provenance.end()) {
                    merged.provenance.push_back(std::move(p));
                }
            }
        }
        if (!merged.found) {
            merged.payload = nullptr;
            merged.note = "no fan-out call found anything";
        }
        chain.results.push_back(std::move(merged));
    }
    return chain;
}

KgOutcome kg_answer(const std::string& query, const std::string& query_time, ChatModel& model,
                    KgBackend& backend, const FunctionRegistry& registry,
                    const PostProcessConfig& cfg, std::optional<Domain> domain) {
    KgOutcome out;
    out.domain = domain ? *domain : classify_domain(query, model);
    if (registry.for_domain(out.domain).empty()) {
        return out;
    }
    out.calls = generate_function_call(query, out.domain, model, registry);
    if (out.calls.empty()) {
        return out;
    }
    auto chain = execute_chain(out.calls, backend);
    out.results = chain.results;
    auto finals = chain.final_results();

    std::vector<std::string> evidence;
    bool all_found = !finals.empty();
    for (const auto& r : finals) {
        if (!r.found) {
            all_found = false;
            continue;
        }
        evidence.push_back(render_payload(r.payload));
        for (const auto& p : r.provenance) {
            if (std::find(out.provenance.begin(), out.provenance.end(), p) ==
                out.provenance.end()) {
                out.provenance.push_back(p);
            }
        }
    }
    out.evidence = join(evidence, "; ");
    if (!all_found || out.provenance.empty()) {
        return out;
    }
    auto processed = post_process(finals, query, query_time, cfg);
    switch (processed.kind) {
        case PostProcessOutcome::Kind::answer:
            out.answer = processed.text;
            break;
        case PostProcessOutcome::Kind::false_premise:
            out.answer = processed.text;
            out.false_premise = true;
            break;
        case PostProcessOutcome::Kind::no_answer:
            break;
    }
    return out;
}

}  // namespace webkg
