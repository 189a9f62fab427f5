#include "webkg/http_backends.hpp"

#include <cmath>

#include <httplib.h>

#include "webkg/error.hpp"

namespace webkg {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw BackendError("backend URL must include a scheme: " + url);
    }
    if (url.compare(0, scheme, "http") != 0) {
        throw BackendError("only http:// backends are supported: " + url);
    }
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body) {
    auto [origin, path] = split_url(endpoint.url);
    httplib::Client client(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
    client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_write_timeout(secs.count(), static_cast<time_t>(usecs.count()));

    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        throw BackendError("POST " + endpoint.url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw BackendError("POST " + endpoint.url + " returned HTTP " +
                           std::to_string(res->status));
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) {
        throw BackendError("POST " + endpoint.url + " returned a non-JSON body");
    }
    return j;
}

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, std::size_t dimension)
    : endpoint_(std::move(endpoint)), dimension_(dimension) {}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(std::span<const std::string> texts) {
    if (texts.empty()) {
        return {};
    }
    nlohmann::json body{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    auto j = post_json(endpoint_, body);
    if (!j.contains("vectors") || !j["vectors"].is_array() || j["vectors"].size() != texts.size()) {
        throw BackendError("embedding backend returned a malformed 'vectors' field");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& v : j["vectors"]) {
        if (!v.is_array() || v.size() != dimension_) {
            throw BackendError("embedding backend returned a vector of the wrong dimension");
        }
        EmbeddingVector e;
        e.values.reserve(dimension_);
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) {
                throw BackendError("embedding backend returned a non-numeric component");
            }
            e.values.push_back(x.get<double>());
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<double> HttpReranker::score(const std::string& query,
                                        std::span<const std::string> texts) {
    if (texts.empty()) {
        return {};
    }
    nlohmann::json body{{"query", query},
                        {"candidates", std::vector<std::string>(texts.begin(), texts.end())}};
    auto j = post_json(endpoint_, body);
    if (!j.contains("scores") || !j["scores"].is_array() || j["scores"].size() != texts.size()) {
        throw BackendError("rerank backend returned a malformed 'scores' field");
    }
    std::vector<double> out;
    for (const auto& s : j["scores"]) {
        if (!s.is_number()) {
            throw BackendError("rerank backend returned a non-numeric score");
        }
        out.push_back(s.get<double>());
    }
    return out;
}

std::string HttpChatModel::send(const std::string& system, const std::string& user) {
    auto j = post_json(endpoint_, {{"system", system}, {"user", user}, {"temperature", 0}});
    if (!j.contains("reply") || !j["reply"].is_string()) {
        throw BackendError("chat backend response lacks a string 'reply'");
    }
    return j["reply"].get<std::string>();
}

KgResult HttpKgBackend::call(const KgFunctionCall& call) {
    auto j = post_json(endpoint_, to_json(call));
    try {
        return kg_result_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("KG service returned a malformed result: ") + e.what());
    }
}

}  // namespace webkg
