#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "webkg/candidate.hpp"
#include "webkg/corpus.hpp"

namespace webkg {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
    double norm() const;
};

class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::size_t dimension() const = 0;
    // One vector per input, same order. Throws BackendError on transport failure.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;

    EmbeddingVector embed(const std::string& text);
};

// Hashed bag-of-tokens: each token lands in one of `dimension` buckets via a
// seeded FNV-1a hash, counts are L2-normalised. Empty text maps to zeros.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dimension = 256, std::uint64_t seed = 0x5eed);

    std::size_t dimension() const override { return dimension_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

    EmbeddingVector embed_one(const std::string& text) const;

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

class Reranker {
public:
    virtual ~Reranker() = default;

    // One relevance score per text. Throws BackendError on transport failure.
    virtual std::vector<double> score(const std::string& query,
                                      std::span<const std::string> texts) = 0;
};

// |query tokens ∩ text tokens| / |query tokens ∪ text tokens| over token sets.
class JaccardReranker final : public Reranker {
public:
    std::vector<double> score(const std::string& query,
                              std::span<const std::string> texts) override;
};

double jaccard_similarity(const std::string& a, const std::string& b);

// Throws std::invalid_argument when dimensions differ. Zero norm gives 0.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// Best n pool chunks by cosine similarity to the query; ties by chunk id.
std::vector<ScoredCandidate> top_n_dense(const std::string& query, std::span<const Chunk> pool,
                                         std::size_t n, Embedder& embedder);

// Reorders candidates by reranker score (ties by chunk id) and tags them as
// stage2_reranked. Candidate ids are looked up in `corpus`; an unknown id
// throws std::out_of_range.
std::vector<ScoredCandidate> rerank(const std::string& query,
                                    std::span<const ScoredCandidate> candidates,
                                    std::span<const Chunk> corpus, Reranker& reranker);

const Chunk& find_chunk(std::span<const Chunk> corpus, std::size_t id);

}  // namespace webkg
