#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace webkg::test {

double oracle_bm25(const std::vector<std::vector<std::string>>& docs,
                   const std::vector<std::string>& query, std::size_t doc, double k1, double b) {
    const double n = static_cast<double>(docs.size());
    double total = 0.0;
    for (const auto& d : docs) {
        total += static_cast<double>(d.size());
    }
    const double avgdl = total / n;
    if (avgdl == 0.0) {
        return 0.0;
    }
    const double len = static_cast<double>(docs[doc].size());
    double score = 0.0;
    for (const auto& term : query) {
        double tf = static_cast<double>(std::count(docs[doc].begin(), docs[doc].end(), term));
        if (tf == 0.0) {
            continue;
        }
        double df = 0.0;
        for (const auto& d : docs) {
            if (std::find(d.begin(), d.end(), term) != d.end()) {
                df += 1.0;
            }
        }
        double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * len / avgdl));
    }
    return score;
}

std::vector<std::pair<std::size_t, double>> oracle_top_k(
    const std::vector<std::vector<std::string>>& docs, const std::vector<std::string>& query,
    std::size_t k, double k1, double b) {
    std::vector<std::pair<std::size_t, double>> all;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        double s = oracle_bm25(docs, query, d, k1, b);
        if (s > 0.0) {
            all.emplace_back(d, s);
        }
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    if (all.size() > k) {
        all.resize(k);
    }
    return all;
}

double oracle_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> sa(a.begin(), a.end());
    std::set<std::string> sb(b.begin(), b.end());
    std::set<std::string> uni = sa;
    uni.insert(sb.begin(), sb.end());
    if (uni.empty()) {
        return 0.0;
    }
    std::size_t inter = 0;
    for (const auto& t : sa) {
        inter += sb.count(t);
    }
    return static_cast<double>(inter) / static_cast<double>(uni.size());
}

double oracle_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<std::size_t> oracle_dense_order(const std::vector<double>& q,
                                            const std::vector<std::vector<double>>& vectors,
                                            const std::vector<std::size_t>& ids, std::size_t n) {
    std::vector<std::size_t> order(vectors.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sims;
    for (const auto& v : vectors) {
        sims.push_back(oracle_cosine(q, v));
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sims[a] != sims[b]) {
            return sims[a] > sims[b];
        }
        return ids[a] < ids[b];
    });
    if (order.size() > n) {
        order.resize(n);
    }
    return order;
}

}  // namespace webkg::test
