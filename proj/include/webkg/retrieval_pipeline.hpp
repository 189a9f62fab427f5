#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "webkg/candidate.hpp"
#include "webkg/corpus.hpp"
#include "webkg/dense_retrieval.hpp"
#include "webkg/instrumentation.hpp"
#include "webkg/sparse_index.hpp"

namespace webkg {

struct RetrievalConfig {
    std::size_t k_stage1 = 200;  // per source group: page bodies, and names + snippets
    std::size_t m_sparse = 5;
    std::size_t n_dense = 20;
    Bm25Params bm25;
    ChunkingConfig chunking;

    // Throws ConfigError naming the violated constraint. Requires positive
    // k/m/n and k_stage1 >= 4 * (m_sparse + n_dense).
    void validate() const;
};

// One piece of evidence handed to the answer prompt.
struct Reference {
    std::string label;  // "[page 3: Some Title]" or "[knowledge graph]"
    std::string text;
    std::optional<std::size_t> chunk_id;
    double score = 0.0;
    Stage stage = Stage::stage2_reranked;
    Method method = Method::reranker;
};

std::string page_label(std::size_t page_index, const std::string& page_name);

struct RetrievalResult {
    std::vector<Chunk> corpus;
    std::vector<ScoredCandidate> stage1;
    std::vector<ScoredCandidate> stage2;
    std::vector<Reference> references;
};

class RetrievalPipeline {
public:
    RetrievalPipeline(RetrievalConfig cfg, Embedder& embedder, Reranker& reranker,
                      Instrumentation* instr = nullptr);

    const RetrievalConfig& config() const { return cfg_; }

    // BM25 top-k over page bodies unioned with BM25 top-k over names and
    // snippets. Body candidates come first.
    std::vector<ScoredCandidate> stage1(const std::string& query,
                                        std::span<const Chunk> corpus) const;

    // Reranked dense top-n followed by the sparse top-m entries the dense
    // branch did not already return. Both branches search only the pool.
    std::vector<ScoredCandidate> stage2(const std::string& query,
                                        std::span<const ScoredCandidate> pool,
                                        std::span<const Chunk> corpus) const;

    RetrievalResult retrieve(const std::string& query, std::span<const Page> pages) const;

private:
    RetrievalConfig cfg_;
    Embedder& embedder_;
    Reranker& reranker_;
    Instrumentation* instr_;
};

}  // namespace webkg
