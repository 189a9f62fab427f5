#pragma once

#include <cstddef>
#include <string_view>

namespace webkg {

enum class Stage { stage1, stage2_sparse, stage2_dense, stage2_reranked };
enum class Method { bm25, dense, reranker };

std::string_view to_string(Stage stage);
std::string_view to_string(Method method);

// A chunk reference with its score from one retrieval step. chunk_id is the
// chunk's ordinal in the query corpus.
struct ScoredCandidate {
    std::size_t chunk_id = 0;
    double score = 0.0;
    Stage stage = Stage::stage1;
    Method method = Method::bm25;

    bool operator==(const ScoredCandidate&) const = default;
};

}  // namespace webkg
