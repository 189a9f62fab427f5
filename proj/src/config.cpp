#include "webkg/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "webkg/error.hpp"

namespace webkg {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
    for (const auto& [key, value] : j.items()) {
        if (known.count(key) == 0) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

template <typename T>
T get(const json& j, const char* key, T fallback, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) {
        return fallback;
    }
    try {
        if constexpr (std::is_unsigned_v<T> && std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<long long>() < 0)) {
                throw ConfigError("config key '" + where + key + "' must be a non-negative integer");
            }
        }
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + where + key + "' has the wrong type");
    }
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
    if (p.empty()) {
        return p;
    }
    fs::path path(p);
    if (path.is_absolute()) {
        return p;
    }
    return (fs::path(base_dir) / path).lexically_normal().string();
}

BackendConfig parse_backend(const json& j, const std::string& name, const std::string& base_dir) {
    BackendConfig b;
    if (j.is_null()) {
        return b;
    }
    if (!j.is_object()) {
        throw ConfigError("config key 'backends." + name + "' must be an object");
    }
    const std::string where = "backends." + name + ".";
    reject_unknown(j, where, {"url", "timeout_ms", "script", "max_in_flight"});
    b.url = get<std::string>(j, "url", "", where);
    b.timeout_ms = get<int>(j, "timeout_ms", b.timeout_ms, where);
    b.script = resolve_path(get<std::string>(j, "script", "", where), base_dir);
    b.max_in_flight = get<std::ptrdiff_t>(j, "max_in_flight", b.max_in_flight, where);
    if (b.timeout_ms <= 0) {
        throw ConfigError("config key '" + where + "timeout_ms' must be positive");
    }
    if (b.max_in_flight < 1) {
        throw ConfigError("config key '" + where + "max_in_flight' must be >= 1");
    }
    return b;
}

}  // namespace

void AppConfig::validate() const {
    retrieval.validate();
    if (worker_count < 1) {
        throw ConfigError("worker_count must be >= 1");
    }
    if (embedding_dimension < 1) {
        throw ConfigError("embedding_dimension must be >= 1");
    }
    validate_profiles(profiles);
}

AppConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    reject_unknown(j, "",
                   {"retrieval", "threshold", "backends", "embedding_dimension", "kg_store_path",
                    "kg_enabled", "false_premise_response", "false_premise_as_missing", "router",
                    "worker_count", "seed"});
    AppConfig cfg;
    if (auto it = j.find("retrieval"); it != j.end()) {
        const auto& r = *it;
        reject_unknown(r, "retrieval.", {"k_stage1", "m_sparse", "n_dense", "bm25", "chunking"});
        cfg.retrieval.k_stage1 = get<std::size_t>(r, "k_stage1", cfg.retrieval.k_stage1, "retrieval.");
        cfg.retrieval.m_sparse = get<std::size_t>(r, "m_sparse", cfg.retrieval.m_sparse, "retrieval.");
        cfg.retrieval.n_dense = get<std::size_t>(r, "n_dense", cfg.retrieval.n_dense, "retrieval.");
        if (auto b = r.find("bm25"); b != r.end()) {
            reject_unknown(*b, "retrieval.bm25.", {"k1", "b"});
            cfg.retrieval.bm25.k1 = get<double>(*b, "k1", cfg.retrieval.bm25.k1, "retrieval.bm25.");
            cfg.retrieval.bm25.b = get<double>(*b, "b", cfg.retrieval.bm25.b, "retrieval.bm25.");
        }
        if (auto c = r.find("chunking"); c != r.end()) {
            reject_unknown(*c, "retrieval.chunking.", {"chunk_size", "overlap"});
            cfg.retrieval.chunking.chunk_size = get<std::size_t>(
                *c, "chunk_size", cfg.retrieval.chunking.chunk_size, "retrieval.chunking.");
            cfg.retrieval.chunking.overlap = get<std::size_t>(
                *c, "overlap", cfg.retrieval.chunking.overlap, "retrieval.chunking.");
        }
    }
    if (auto it = j.find("threshold"); it != j.end()) {
        auto tier = it->is_string() ? parse_confidence(it->get<std::string>()) : std::nullopt;
        if (!tier) {
            throw ConfigError("threshold must be one of low, medium, high");
        }
        cfg.threshold = *tier;
    }
    if (auto it = j.find("backends"); it != j.end()) {
        reject_unknown(*it, "backends.", {"chat", "embedding", "rerank", "judge", "kg"});
        cfg.chat = parse_backend(it->value("chat", json()), "chat", base_dir);
        cfg.embedding = parse_backend(it->value("embedding", json()), "embedding", base_dir);
        cfg.rerank = parse_backend(it->value("rerank", json()), "rerank", base_dir);
        cfg.judge = parse_backend(it->value("judge", json()), "judge", base_dir);
        cfg.kg = parse_backend(it->value("kg", json()), "kg", base_dir);
    }
    cfg.embedding_dimension =
        get<std::size_t>(j, "embedding_dimension", cfg.embedding_dimension, "");
    cfg.kg_store_path = resolve_path(get<std::string>(j, "kg_store_path", "", ""), base_dir);
    cfg.kg_enabled = get<bool>(j, "kg_enabled", cfg.kg_enabled, "");
    cfg.false_premise_response =
        get<std::string>(j, "false_premise_response", cfg.false_premise_response, "");
    cfg.false_premise_as_missing =
        get<bool>(j, "false_premise_as_missing", cfg.false_premise_as_missing, "");
    cfg.worker_count = get<std::size_t>(j, "worker_count", cfg.worker_count, "");
    cfg.seed = get<std::uint64_t>(j, "seed", cfg.seed, "");

    if (auto it = j.find("router"); it != j.end()) {
        reject_unknown(*it, "router.", {"profiles"});
        if (auto p = it->find("profiles"); p != it->end()) {
            if (!p->is_object()) {
                throw ConfigError("router.profiles must be an object keyed by domain");
            }
            for (const auto& [name, body] : p->items()) {
                auto domain = parse_domain(name);
                if (!domain) {
                    throw ConfigError("router.profiles: unknown domain '" + name + "'");
                }
                const std::string where = "router.profiles." + name + ".";
                reject_unknown(body, where, {"dynamism", "kg_priority", "refresh_hours"});
                auto& profile = cfg.profiles[*domain];
                profile.domain = *domain;
                if (body.contains("dynamism")) {
                    auto d = parse_dynamism(get<std::string>(body, "dynamism", "", where));
                    if (!d) {
                        throw ConfigError("config key '" + where + "dynamism' is not a dynamism");
                    }
                    profile.default_dynamism = *d;
                }
                profile.kg_priority = get<bool>(body, "kg_priority", profile.kg_priority, where);
                profile.refresh_interval = std::chrono::hours(get<long long>(
                    body, "refresh_hours", profile.refresh_interval.count(), where));
            }
        }
    }
    return cfg;
}

void apply_env_overrides(AppConfig& cfg) {
    const std::pair<const char*, BackendConfig*> vars[] = {
        {"WEBKG_CHAT_URL", &cfg.chat},     {"WEBKG_EMBEDDING_URL", &cfg.embedding},
        {"WEBKG_RERANK_URL", &cfg.rerank}, {"WEBKG_JUDGE_URL", &cfg.judge},
        {"WEBKG_KG_URL", &cfg.kg},
    };
    for (const auto& [name, backend] : vars) {
        if (const char* v = std::getenv(name); v != nullptr && *v != '\0') {
            backend->url = v;
        }
    }
}

AppConfig load_config(const std::string& path) {
    AppConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file: " + path);
        }
        std::stringstream buf;
        buf << in.rdbuf();
        auto j = json::parse(buf.str(), nullptr, false);
        if (j.is_discarded()) {
            throw ConfigError(path + ": invalid JSON");
        }
        auto base = fs::path(path).parent_path().string();
        cfg = parse_config(j, base.empty() ? "." : base);
    }
    apply_env_overrides(cfg);
    cfg.validate();
    return cfg;
}

}  // namespace webkg
