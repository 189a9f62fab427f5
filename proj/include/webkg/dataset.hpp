#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webkg/corpus.hpp"

namespace webkg {

// One benchmark question with its pre-fetched search results.
struct Record {
    std::string id;
    std::string query;
    std::string query_time;
    std::string domain;
    std::string static_or_dynamic;
    std::string question_type;
    std::optional<std::string> answer;
    std::vector<Page> pages;
};

// Throws DataError naming the missing or mistyped field.
Record parse_record(const nlohmann::json& j, const std::string& fallback_id);
std::vector<Page> parse_pages(const nlohmann::json& search_results);

// JSON lines, one record per line. Errors carry path and line number.
std::vector<Record> load_dataset(const std::string& path);

// A file holding either one record object or a bare search_results array.
// For the bare form only `pages` is filled.
Record load_pages_file(const std::string& path);

}  // namespace webkg
