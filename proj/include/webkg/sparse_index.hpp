#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "webkg/candidate.hpp"
#include "webkg/corpus.hpp"

namespace webkg {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;

    // Throws ConfigError unless k1 >= 0 and 0 <= b <= 1.
    void validate() const;
};

struct Posting {
    std::size_t doc = 0;
    std::size_t tf = 0;

    bool operator==(const Posting&) const = default;
};

// Immutable term -> postings index over an ordered document list. Document
// ordinals are positions in the list given to build().
class InvertedIndex {
public:
    InvertedIndex() = default;

    static InvertedIndex build(std::span<const Chunk> chunks);
    static InvertedIndex build(std::span<const std::vector<std::string>> docs);

    std::size_t doc_count() const { return doc_lengths_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    std::size_t doc_length(std::size_t doc) const { return doc_lengths_.at(doc); }
    const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }
    std::size_t doc_freq(const std::string& term) const;

    // Empty span when the term is not indexed. Sorted by doc, one entry per doc.
    std::span<const Posting> postings(const std::string& term) const;
    std::size_t term_frequency(const std::string& term, std::size_t doc) const;
    std::size_t vocabulary_size() const { return postings_.size(); }

    double idf(const std::string& term) const;

private:
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::size_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
};

// Okapi BM25 with the non-negative IDF ln((N - df + 0.5) / (df + 0.5) + 1).
// Repeated query terms count repeatedly. Throws std::out_of_range for a doc
// ordinal outside the index.
double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  std::span<const std::string> query_terms, std::size_t doc);

// Up to k documents with positive score, best first, ties by ascending ordinal.
// chunk_id holds the index ordinal; stage is stage1 and method bm25.
std::vector<ScoredCandidate> top_k(const InvertedIndex& index, const Bm25Params& params,
                                   std::span<const std::string> query_terms, std::size_t k);

}  // namespace webkg
