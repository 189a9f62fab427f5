#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webkg {

// One web search result as delivered in the dataset.
struct Page {
    std::string page_name;
    std::string page_html;
    std::string page_snippet;
};

enum class SourceKind { page_result, page_name, page_snippet };

std::string_view to_string(SourceKind kind);

struct Chunk {
    std::size_t id = 0;          // unique ordinal within one query's corpus
    std::size_t page_index = 0;  // position of the source page in the result list
    SourceKind source = SourceKind::page_result;
    std::string text;            // tokens joined by single spaces
    std::size_t token_count = 0;
    std::size_t token_offset = 0;  // first token's position in the source stream
};

struct ChunkingConfig {
    std::size_t chunk_size = 500;
    std::size_t overlap = 0;

    // Throws ConfigError unless chunk_size > 0 and overlap < chunk_size.
    void validate() const;
};

// Visible text of an HTML document. Never fails: malformed markup is read
// best-effort. Script/style/noscript/template bodies and comments are dropped,
// block-level elements become line breaks, entities are decoded, and each line
// is whitespace-collapsed and trimmed. Empty lines are removed.
std::string parse_html(std::string_view html);

// Maximal runs of [A-Za-z0-9'] (plus non-ASCII bytes, so UTF-8 words stay
// whole), lowercased; every other non-whitespace byte is its own token.
std::vector<std::string> tokenize(std::string_view text);

std::string detokenize(std::span<const std::string> tokens);

// Fixed-size windows advancing by chunk_size - overlap. Chunks get sequential
// ids from zero and page_index 0; build_corpus rewrites attribution.
std::vector<Chunk> chunk(std::span<const std::string> tokens, const ChunkingConfig& cfg);

// Page order, then body chunks, the name chunk, and snippet chunks.
std::vector<Chunk> build_corpus(std::span<const Page> pages, const ChunkingConfig& cfg);

}  // namespace webkg
