#include "webkg/dataset.hpp"

#include <fstream>
#include <sstream>

#include "webkg/error.hpp"
#include "webkg/strings.hpp"

namespace webkg {

namespace {

std::string text_field(const nlohmann::json& j, const char* key, bool required) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        if (required) {
            throw DataError(std::string("missing field '") + key + "'");
        }
        return {};
    }
    if (it->is_string()) {
        return it->get<std::string>();
    }
    if (it->is_number() || it->is_boolean()) {
        return it->dump();
    }
    throw DataError(std::string("field '") + key + "' must be text");
}

}  // namespace

std::vector<Page> parse_pages(const nlohmann::json& search_results) {
    if (!search_results.is_array()) {
        throw DataError("search_results must be an array");
    }
    std::vector<Page> pages;
    pages.reserve(search_results.size());
    for (std::size_t i = 0; i < search_results.size(); ++i) {
        const auto& p = search_results[i];
        if (!p.is_object()) {
            throw DataError("search_results[" + std::to_string(i) + "] must be an object");
        }
        try {
            pages.push_back({text_field(p, "page_name", false), text_field(p, "page_result", false),
                             text_field(p, "page_snippet", false)});
        } catch (const DataError& e) {
            throw DataError("search_results[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return pages;
}

Record parse_record(const nlohmann::json& j, const std::string& fallback_id) {
    if (!j.is_object()) {
        throw DataError("record must be a JSON object");
    }
    Record r;
    r.id = text_field(j, "interaction_id", false);
    if (r.id.empty()) {
        r.id = text_field(j, "id", false);
    }
    if (r.id.empty()) {
        r.id = fallback_id;
    }
    r.query = text_field(j, "query", true);
    r.query_time = text_field(j, "query_time", false);
    r.domain = text_field(j, "domain", false);
    r.static_or_dynamic = text_field(j, "static_or_dynamic", false);
    r.question_type = text_field(j, "question_type", false);
    if (j.contains("answer") && !j["answer"].is_null()) {
        r.answer = text_field(j, "answer", false);
    }
    if (j.contains("search_results")) {
        r.pages = parse_pages(j["search_results"]);
    }
    return r;
}

std::vector<Record> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset: " + path);
    }
    std::vector<Record> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        auto where = path + ":" + std::to_string(lineno) + ": ";
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw DataError(where + "invalid JSON");
        }
        try {
            records.push_back(parse_record(j, "line-" + std::to_string(lineno)));
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    return records;
}

Record load_pages_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open pages file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto j = nlohmann::json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) {
        throw DataError(path + ": invalid JSON");
    }
    try {
        if (j.is_array()) {
            Record r;
            r.id = "ask";
            r.pages = parse_pages(j);
            return r;
        }
        if (j.is_object() && !j.contains("query")) {
            Record r;
            r.id = "ask";
            r.pages = parse_pages(j.value("search_results", nlohmann::json::array()));
            r.query_time = text_field(j, "query_time", false);
            return r;
        }
        return parse_record(j, "ask");
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace webkg
