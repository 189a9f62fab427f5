#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace webkg {

struct KgEntity {
    std::string entity_type;  // canonical form
    std::string name;         // canonical form
    nlohmann::json attributes = nlohmann::json::object();
};

struct KgRelation {
    std::string subject;
    std::string predicate;
    std::string object;
};

// Immutable once loaded; lookups are by canonicalised (type, name).
class KgStore {
public:
    // JSON lines: {"entity_type", "name", "attributes"} or {"relation": [s, p, o]}.
    // Relation endpoints may appear before or after the entity lines. Throws
    // DataError with the offending line number.
    static KgStore load(const std::string& path);
    static KgStore parse(std::istream& in, const std::string& source = "<stream>");

    // Builders used by tests and fixtures; throw DataError on duplicates or
    // dangling relation endpoints.
    void add_entity(const std::string& entity_type, const std::string& name,
                    nlohmann::json attributes);
    void add_relation(const std::string& subject, const std::string& predicate,
                      const std::string& object);

    const KgEntity* find(const std::string& entity_type, const std::string& name) const;
    // Objects of (subject, predicate) triples, in insertion order.
    std::vector<std::string> related(const std::string& subject,
                                     const std::string& predicate) const;
    bool has_entity_named(const std::string& name) const;

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t relation_count() const { return relations_.size(); }
    const std::vector<KgRelation>& relations() const { return relations_; }

private:
    std::map<std::pair<std::string, std::string>, KgEntity> entities_;
    std::set<std::string> names_;
    std::vector<KgRelation> relations_;
};

}  // namespace webkg
