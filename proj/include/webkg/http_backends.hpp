#pragma once

#include <chrono>
#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "webkg/chat.hpp"
#include "webkg/dense_retrieval.hpp"
#include "webkg/kg_workflow.hpp"

namespace webkg {

struct HttpEndpoint {
    std::string url;  // http://host[:port]/path
    std::chrono::milliseconds timeout{30000};
};

// POSTs JSON and returns the parsed 200 response body. Connection failures,
// non-200 statuses, and non-JSON bodies throw BackendError.
nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body);

// {"texts": [...]} -> {"vectors": [[...], ...]}
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(HttpEndpoint endpoint, std::size_t dimension);

    std::size_t dimension() const override { return dimension_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

private:
    HttpEndpoint endpoint_;
    std::size_t dimension_;
};

// {"query": "...", "candidates": [...]} -> {"scores": [...]}
class HttpReranker final : public Reranker {
public:
    explicit HttpReranker(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

    std::vector<double> score(const std::string& query,
                              std::span<const std::string> texts) override;

private:
    HttpEndpoint endpoint_;
};

// {"system": "...", "user": "...", "temperature": 0} -> {"reply": "..."}
class HttpChatModel final : public ChatModel {
public:
    explicit HttpChatModel(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

    std::string send(const std::string& system, const std::string& user) override;
    using ChatModel::send;

private:
    HttpEndpoint endpoint_;
};

// Executes calls against a running mock KG service (POST /call).
class HttpKgBackend final : public KgBackend {
public:
    explicit HttpKgBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

    KgResult call(const KgFunctionCall& call) override;

private:
    HttpEndpoint endpoint_;
};

}  // namespace webkg
