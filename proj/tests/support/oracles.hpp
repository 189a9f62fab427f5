#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace webkg::test {

// Straight transcription of Okapi BM25 with the non-negative idf, computed
// from raw token lists with no index.
double oracle_bm25(const std::vector<std::vector<std::string>>& docs,
                   const std::vector<std::string>& query, std::size_t doc, double k1, double b);

// Scores every document, drops zeros, sorts by score desc then ordinal asc.
std::vector<std::pair<std::size_t, double>> oracle_top_k(
    const std::vector<std::vector<std::string>>& docs, const std::vector<std::string>& query,
    std::size_t k, double k1, double b);

double oracle_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

double oracle_cosine(const std::vector<double>& u, const std::vector<double>& v);

// Indices of `vectors` by cosine to `q` desc, ties by `ids` asc, first n.
std::vector<std::size_t> oracle_dense_order(const std::vector<double>& q,
                                            const std::vector<std::vector<double>>& vectors,
                                            const std::vector<std::size_t>& ids, std::size_t n);

}  // namespace webkg::test
