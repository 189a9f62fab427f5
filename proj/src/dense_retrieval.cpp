#include "webkg/dense_retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "webkg/error.hpp"
#include "webkg/strings.hpp"

namespace webkg {

namespace {

bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
    return a.score != b.score ? a.score > b.score : a.chunk_id < b.chunk_id;
}

}  // namespace

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (double v : values) {
        sum += v * v;
    }
    return std::sqrt(sum);
}

EmbeddingVector Embedder::embed(const std::string& text) {
    auto out = embed_batch(std::span<const std::string>(&text, 1));
    if (out.size() != 1) {
        throw BackendError("embedder returned " + std::to_string(out.size()) +
                           " vectors for one input");
    }
    return std::move(out.front());
}

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
    if (dimension_ == 0) {
        throw ConfigError("embedding dimension must be positive");
    }
}

EmbeddingVector HashingEmbedder::embed_one(const std::string& text) const {
    EmbeddingVector v{std::vector<double>(dimension_, 0.0)};
    for (const auto& token : tokenize(text)) {
        v.values[fnv1a64(token, seed_) % dimension_] += 1.0;
    }
    double n = v.norm();
    if (n > 0.0) {
        for (auto& x : v.values) {
            x /= n;
        }
    }
    return v;
}

std::vector<EmbeddingVector> HashingEmbedder::embed_batch(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        out.push_back(embed_one(t));
    }
    return out;
}

double jaccard_similarity(const std::string& a, const std::string& b) {
    auto ta = tokenize(a);
    auto tb = tokenize(b);
    std::set<std::string> sa(ta.begin(), ta.end());
    std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) {
        return 0.0;
    }
    std::size_t inter = 0;
    for (const auto& t : sa) {
        inter += sb.count(t);
    }
    return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

std::vector<double> JaccardReranker::score(const std::string& query,
                                           std::span<const std::string> texts) {
    std::vector<double> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        out.push_back(jaccard_similarity(query, t));
    }
    return out;
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dimension() != v.dimension()) {
        throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                    std::to_string(u.dimension()) + " vs " +
                                    std::to_string(v.dimension()) + ")");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
    }
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) {
        return 0.0;
    }
    return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

std::vector<ScoredCandidate> top_n_dense(const std::string& query, std::span<const Chunk> pool,
                                         std::size_t n, Embedder& embedder) {
    std::vector<ScoredCandidate> out;
    if (n == 0 || pool.empty()) {
        return out;
    }
    std::vector<std::string> texts;
    texts.reserve(pool.size() + 1);
    texts.push_back(query);
    for (const auto& c : pool) {
        texts.push_back(c.text);
    }
    auto vectors = embedder.embed_batch(texts);
    if (vectors.size() != texts.size()) {
        throw BackendError("embedder returned " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(texts.size()) + " inputs");
    }
    out.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        double sim = cosine_similarity(vectors[0], vectors[i + 1]);
        if (!std::isfinite(sim)) {
            throw BackendError("embedder produced a non-finite similarity");
        }
        out.push_back({pool[i].id, sim, Stage::stage2_dense, Method::dense});
    }
    std::sort(out.begin(), out.end(), ranks_before);
    if (out.size() > n) {
        out.resize(n);
    }
    return out;
}

const Chunk& find_chunk(std::span<const Chunk> corpus, std::size_t id) {
    if (id < corpus.size() && corpus[id].id == id) {
        return corpus[id];
    }
    auto it = std::find_if(corpus.begin(), corpus.end(),
                           [id](const Chunk& c) { return c.id == id; });
    if (it == corpus.end()) {
        throw std::out_of_range("no chunk with id " + std::to_string(id));
    }
    return *it;
}

std::vector<ScoredCandidate> rerank(const std::string& query,
                                    std::span<const ScoredCandidate> candidates,
                                    std::span<const Chunk> corpus, Reranker& reranker) {
    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const auto& c : candidates) {
        texts.push_back(find_chunk(corpus, c.chunk_id).text);
    }
    std::vector<ScoredCandidate> out(candidates.begin(), candidates.end());
    if (out.empty()) {
        return out;
    }
    auto scores = reranker.score(query, texts);
    if (scores.size() != out.size()) {
        throw BackendError("reranker returned " + std::to_string(scores.size()) +
                           " scores for " + std::to_string(out.size()) + " candidates");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw BackendError("reranker produced a non-finite score");
        }
        out[i].score = scores[i];
        out[i].stage = Stage::stage2_reranked;
        out[i].method = Method::reranker;
    }
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
}

}  // namespace webkg
