#include "webkg/kg_store.hpp"

#include <fstream>

#include "webkg/error.hpp"
#include "webkg/strings.hpp"

namespace webkg {

KgStore KgStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open KG store: " + path);
    }
    return parse(in, path);
}

KgStore KgStore::parse(std::istream& in, const std::string& source) {
    KgStore store;
    struct PendingRelation {
        KgRelation rel;
        std::size_t line;
    };
    std::vector<PendingRelation> pending;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        auto where = source + ":" + std::to_string(lineno) + ": ";
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw DataError(where + "not a JSON object");
        }
        if (j.contains("relation")) {
            const auto& r = j["relation"];
            if (!r.is_array() || r.size() != 3 || !r[0].is_string() || !r[1].is_string() ||
                !r[2].is_string()) {
                throw DataError(where + "relation must be [subject, predicate, object] strings");
            }
            pending.push_back({{canonicalize(r[0].get<std::string>()),
                                canonicalize(r[1].get<std::string>()),
                                canonicalize(r[2].get<std::string>())},
                               lineno});
            continue;
        }
        if (!j.contains("entity_type") || !j["entity_type"].is_string() || !j.contains("name") ||
            !j["name"].is_string()) {
            throw DataError(where + "entity lines need string entity_type and name");
        }
        auto attrs = j.value("attributes", nlohmann::json::object());
        if (!attrs.is_object()) {
            throw DataError(where + "attributes must be an object");
        }
        try {
            store.add_entity(j["entity_type"].get<std::string>(), j["name"].get<std::string>(),
                             std::move(attrs));
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    for (auto& p : pending) {
        try {
            store.add_relation(p.rel.subject, p.rel.predicate, p.rel.object);
        } catch (const DataError& e) {
            throw DataError(source + ":" + std::to_string(p.line) + ": " + e.what());
        }
    }
    return store;
}

void KgStore::add_entity(const std::string& entity_type, const std::string& name,
                         nlohmann::json attributes) {
    KgEntity e{canonicalize(entity_type), canonicalize(name), std::move(attributes)};
    if (e.name.empty()) {
        throw DataError("entity name must be non-empty");
    }
    auto key = std::make_pair(e.entity_type, e.name);
    if (entities_.count(key) != 0) {
        throw DataError("duplicate entity (" + e.entity_type + ", " + e.name + ")");
    }
    names_.insert(e.name);
    entities_.emplace(std::move(key), std::move(e));
}

void KgStore::add_relation(const std::string& subject, const std::string& predicate,
                           const std::string& object) {
    KgRelation r{canonicalize(subject), canonicalize(predicate), canonicalize(object)};
    for (const auto* endpoint : {&r.subject, &r.object}) {
        if (names_.count(*endpoint) == 0) {
            throw DataError("relation endpoint '" + *endpoint + "' is not a known entity");
        }
    }
    relations_.push_back(std::move(r));
}

const KgEntity* KgStore::find(const std::string& entity_type, const std::string& name) const {
    auto it = entities_.find({canonicalize(entity_type), canonicalize(name)});
    return it == entities_.end() ? nullptr : &it->second;
}

std::vector<std::string> KgStore::related(const std::string& subject,
                                          const std::string& predicate) const {
    auto s = canonicalize(subject);
    auto p = canonicalize(predicate);
    std::vector<std::string> out;
    for (const auto& r : relations_) {
        if (r.subject == s && r.predicate == p) {
            out.push_back(r.object);
        }
    }
    return out;
}

bool KgStore::has_entity_named(const std::string& name) const {
    return names_.count(canonicalize(name)) != 0;
}

}  // namespace webkg
