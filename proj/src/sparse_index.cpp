#include "webkg/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "webkg/error.hpp"

namespace webkg {

namespace {

double term_weight(double idf, double tf, double doc_len, double avg_dl, const Bm25Params& p) {
    return idf * (tf * (p.k1 + 1.0)) / (tf + p.k1 * (1.0 - p.b + p.b * doc_len / avg_dl));
}

}  // namespace

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::stage1:
            return "stage1";
        case Stage::stage2_sparse:
            return "stage2_sparse";
        case Stage::stage2_dense:
            return "stage2_dense";
        case Stage::stage2_reranked:
            return "stage2_reranked";
    }
    return "stage1";
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::bm25:
            return "bm25";
        case Method::dense:
            return "dense";
        case Method::reranker:
            return "reranker";
    }
    return "bm25";
}

void Bm25Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw ConfigError("bm25.k1 must be a finite value >= 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw ConfigError("bm25.b must lie in [0, 1]");
    }
}

InvertedIndex InvertedIndex::build(std::span<const Chunk> chunks) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(chunks.size());
    for (const auto& c : chunks) {
        docs.push_back(tokenize(c.text));
    }
    return build(docs);
}

InvertedIndex InvertedIndex::build(std::span<const std::vector<std::string>> docs) {
    InvertedIndex index;
    index.doc_lengths_.reserve(docs.size());
    std::size_t total = 0;
    for (std::size_t doc = 0; doc < docs.size(); ++doc) {
        std::unordered_map<std::string, std::size_t> tf;
        for (const auto& term : docs[doc]) {
            ++tf[term];
        }
        for (auto& [term, count] : tf) {
            // Documents are visited in order, so each list stays sorted.
            index.postings_[term].push_back({doc, count});
        }
        index.doc_lengths_.push_back(docs[doc].size());
        total += docs[doc].size();
    }
    if (!docs.empty()) {
        index.avg_doc_length_ = static_cast<double>(total) / static_cast<double>(docs.size());
    }
    return index;
}

std::size_t InvertedIndex::doc_freq(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

std::span<const Posting> InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) {
        return {};
    }
    return it->second;
}

std::size_t InvertedIndex::term_frequency(const std::string& term, std::size_t doc) const {
    auto list = postings(term);
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, std::size_t d) { return p.doc < d; });
    return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

double InvertedIndex::idf(const std::string& term) const {
    const auto n = static_cast<double>(doc_count());
    const auto df = static_cast<double>(doc_freq(term));
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  std::span<const std::string> query_terms, std::size_t doc) {
    if (doc >= index.doc_count()) {
        throw std::out_of_range("bm25_score: document ordinal " + std::to_string(doc) +
                                " outside index of " + std::to_string(index.doc_count()));
    }
    if (index.avg_doc_length() <= 0.0) {
        return 0.0;
    }
    const auto len = static_cast<double>(index.doc_length(doc));
    double score = 0.0;
    for (const auto& term : query_terms) {
        auto tf = index.term_frequency(term, doc);
        if (tf == 0) {
            continue;
        }
        score += term_weight(index.idf(term), static_cast<double>(tf), len,
                             index.avg_doc_length(), params);
    }
    return score;
}

std::vector<ScoredCandidate> top_k(const InvertedIndex& index, const Bm25Params& params,
                                   std::span<const std::string> query_terms, std::size_t k) {
    std::vector<ScoredCandidate> out;
    if (k == 0 || index.doc_count() == 0 || index.avg_doc_length() <= 0.0) {
        return out;
    }
    std::vector<double> scores(index.doc_count(), 0.0);
    std::vector<char> touched(index.doc_count(), 0);
    for (const auto& term : query_terms) {
        auto list = index.postings(term);
        if (list.empty()) {
            continue;
        }
        const double idf = index.idf(term);
        for (const auto& p : list) {
            scores[p.doc] += term_weight(idf, static_cast<double>(p.tf),
                                         static_cast<double>(index.doc_length(p.doc)),
                                         index.avg_doc_length(), params);
            touched[p.doc] = 1;
        }
    }
    for (std::size_t doc = 0; doc < scores.size(); ++doc) {
        if (touched[doc] && scores[doc] > 0.0) {
            out.push_back({doc, scores[doc], Stage::stage1, Method::bm25});
        }
    }
    auto better = [](const ScoredCandidate& a, const ScoredCandidate& b) {
        return a.score != b.score ? a.score > b.score : a.chunk_id < b.chunk_id;
    };
    if (out.size() > k) {
        std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(),
                          better);
        out.resize(k);
    } else {
        std::sort(out.begin(), out.end(), better);
    }
    return out;
}

}  // namespace webkg
