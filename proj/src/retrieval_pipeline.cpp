#include "webkg/retrieval_pipeline.hpp"

#include <unordered_set>

#include "webkg/error.hpp"

namespace webkg {

void RetrievalConfig::validate() const {
    if (k_stage1 == 0 || m_sparse == 0 || n_dense == 0) {
        throw ConfigError("retrieval: k_stage1, m_sparse and n_dense must be positive");
    }
    if (k_stage1 < 4 * (m_sparse + n_dense)) {
        throw ConfigError("retrieval: k_stage1 (" + std::to_string(k_stage1) +
                          ") must be at least 4 * (m_sparse + n_dense) = " +
                          std::to_string(4 * (m_sparse + n_dense)));
    }
    bm25.validate();
    chunking.validate();
}

std::string page_label(std::size_t page_index, const std::string& page_name) {
    return "[page " + std::to_string(page_index) + ": " + page_name + "]";
}

RetrievalPipeline::RetrievalPipeline(RetrievalConfig cfg, Embedder& embedder, Reranker& reranker,
                                     Instrumentation* instr)
    : cfg_(std::move(cfg)), embedder_(embedder), reranker_(reranker), instr_(instr) {
    cfg_.validate();
}

std::vector<ScoredCandidate> RetrievalPipeline::stage1(const std::string& query,
                                                       std::span<const Chunk> corpus) const {
    const auto terms = tokenize(query);
    std::vector<Chunk> bodies;
    std::vector<Chunk> headers;
    for (const auto& c : corpus) {
        (c.source == SourceKind::page_result ? bodies : headers).push_back(c);
    }

    std::vector<ScoredCandidate> out;
    for (const auto* group : {&bodies, &headers}) {
        if (group->empty()) {
            continue;
        }
        auto index = InvertedIndex::build(*group);
        bump(instr_, &Instrumentation::index_builds);
        for (auto cand : top_k(index, cfg_.bm25, terms, cfg_.k_stage1)) {
            cand.chunk_id = (*group)[cand.chunk_id].id;
            out.push_back(cand);
        }
    }
    return out;
}

std::vector<ScoredCandidate> RetrievalPipeline::stage2(const std::string& query,
                                                       std::span<const ScoredCandidate> pool,
                                                       std::span<const Chunk> corpus) const {
    if (pool.empty()) {
        return {};
    }
    std::vector<Chunk> pool_chunks;
    pool_chunks.reserve(pool.size());
    for (const auto& cand : pool) {
        pool_chunks.push_back(find_chunk(corpus, cand.chunk_id));
    }

    const auto terms = tokenize(query);
    auto index = InvertedIndex::build(pool_chunks);
    bump(instr_, &Instrumentation::index_builds);
    auto sparse = top_k(index, cfg_.bm25, terms, cfg_.m_sparse);
    for (auto& cand : sparse) {
        cand.chunk_id = pool_chunks[cand.chunk_id].id;
        cand.stage = Stage::stage2_sparse;
    }

    auto dense = top_n_dense(query, pool_chunks, cfg_.n_dense, embedder_);
    auto reranked = rerank(query, dense, corpus, reranker_);

    std::vector<ScoredCandidate> out = reranked;
    std::unordered_set<std::size_t> seen;
    for (const auto& cand : reranked) {
        seen.insert(cand.chunk_id);
    }
    for (const auto& cand : sparse) {
        if (seen.insert(cand.chunk_id).second) {
            out.push_back(cand);
        }
    }
    return out;
}

RetrievalResult RetrievalPipeline::retrieve(const std::string& query,
                                            std::span<const Page> pages) const {
    RetrievalResult result;
    if (pages.empty()) {
        return result;
    }
    result.corpus = build_corpus(pages, cfg_.chunking);
    bump(instr_, &Instrumentation::corpus_builds);
    result.stage1 = stage1(query, result.corpus);
    result.stage2 = stage2(query, result.stage1, result.corpus);
    result.references.reserve(result.stage2.size());
    for (const auto& cand : result.stage2) {
        const auto& c = find_chunk(result.corpus, cand.chunk_id);
        Reference ref;
        ref.label = page_label(c.page_index, pages[c.page_index].page_name);
        ref.text = c.text;
        ref.chunk_id = c.id;
        ref.score = cand.score;
        ref.stage = cand.stage;
        ref.method = cand.method;
        result.references.push_back(std::move(ref));
    }
    return result;
}

}  // namespace webkg
