#include "webkg/corpus.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>

#include "webkg/error.hpp"

namespace webkg {

namespace {

bool is_ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ascii_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_html_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (s.size() - pos < prefix.size()) {
        return false;
    }
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
        if (c != prefix[i]) {
            return false;
        }
    }
    return true;
}

bool is_block_tag(std::string_view name) {
    static constexpr auto kBlock = std::to_array<std::string_view>({
        "address", "article", "aside", "blockquote", "body", "br", "caption",
        "dd", "details", "dialog", "div", "dl", "dt", "fieldset", "figcaption",
        "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "head",
        "header", "hr", "html", "li", "main", "nav", "ol", "option", "p", "pre",
        "section", "summary", "table", "tbody", "td", "tfoot", "th", "thead",
        "title", "tr", "ul"});
    return std::find(kBlock.begin(), kBlock.end(), name) != kBlock.end();
}

bool is_raw_text_tag(std::string_view name) {
    return name == "script" || name == "style" || name == "noscript" || name == "template";
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        cp = 0xFFFD;
    }
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

const std::unordered_map<std::string_view, std::uint32_t>& named_entities() {
    static const std::unordered_map<std::string_view, std::uint32_t> kEntities = {
        {"amp", '&'},      {"lt", '<'},        {"gt", '>'},       {"quot", '"'},
        {"apos", '\''},    {"nbsp", ' '},      {"copy", 0xA9},    {"reg", 0xAE},
        {"trade", 0x2122}, {"hellip", 0x2026}, {"mdash", 0x2014}, {"ndash", 0x2013},
        {"lsquo", 0x2018}, {"rsquo", 0x2019},  {"ldquo", 0x201C}, {"rdquo", 0x201D},
        {"euro", 0x20AC},  {"pound", 0xA3},    {"yen", 0xA5},     {"cent", 0xA2},
        {"deg", 0xB0},     {"middot", 0xB7},   {"bull", 0x2022},  {"times", 0xD7},
        {"divide", 0xF7},  {"laquo", 0xAB},    {"raquo", 0xBB},   {"sect", 0xA7},
        {"para", 0xB6},    {"plusmn", 0xB1},   {"frac12", 0xBD},  {"eacute", 0xE9},
    };
    return kEntities;
}

// Decodes the entity starting at html[pos] == '&'. Returns the number of bytes
// consumed, or 0 when the text is not a recognised entity.
std::size_t decode_entity(std::string_view html, std::size_t pos, std::string& out) {
    auto semi = html.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 12 || semi == pos + 1) {
        return 0;
    }
    auto body = html.substr(pos + 1, semi - pos - 1);
    if (body[0] == '#') {
        std::uint32_t cp = 0;
        bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
        auto digits = body.substr(hex ? 2 : 1);
        if (digits.empty() || digits.size() > 7) {
            return 0;
        }
        for (char c : digits) {
            std::uint32_t d;
            if (is_ascii_digit(c)) {
                d = static_cast<std::uint32_t>(c - '0');
            } else if (hex && c >= 'a' && c <= 'f') {
                d = static_cast<std::uint32_t>(c - 'a' + 10);
            } else if (hex && c >= 'A' && c <= 'F') {
                d = static_cast<std::uint32_t>(c - 'A' + 10);
            } else {
                return 0;
            }
            cp = cp * (hex ? 16 : 10) + d;
        }
        if (cp == 0xA0) {
            cp = ' ';
        }
        append_utf8(out, cp);
        return semi - pos + 1;
    }
    auto it = named_entities().find(body);
    if (it == named_entities().end()) {
        return 0;
    }
    append_utf8(out, it->second);
    return semi - pos + 1;
}

// Skips to just past the '>' closing a tag, honouring quoted attribute values.
std::size_t skip_tag(std::string_view html, std::size_t pos) {
    char quote = 0;
    for (; pos < html.size(); ++pos) {
        char c = html[pos];
        if (quote != 0) {
            if (c == quote) {
                quote = 0;
            }
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return pos + 1;
        }
    }
    return html.size();
}

std::string read_tag_name(std::string_view html, std::size_t& pos) {
    std::string name;
    while (pos < html.size() &&
           (is_ascii_alpha(html[pos]) || is_ascii_digit(html[pos]) || html[pos] == '-')) {
        char c = html[pos++];
        name.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
    return name;
}

std::string normalize_lines(std::string_view raw) {
    std::string out;
    std::string line;
    auto flush = [&] {
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        if (!line.empty()) {
            if (!out.empty()) {
                out.push_back('\n');
            }
            out.append(line);
        }
        line.clear();
    };
    for (char c : raw) {
        if (c == '\n') {
            flush();
        } else if (is_html_space(c)) {
            if (!line.empty() && line.back() != ' ') {
                line.push_back(' ');
            }
        } else {
            line.push_back(c);
        }
    }
    flush();
    return out;
}

bool is_word_byte(char c) {
    return is_ascii_alpha(c) || is_ascii_digit(c) || c == '\'' ||
           static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace

std::string_view to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::page_result:
            return "page_result";
        case SourceKind::page_name:
            return "page_name";
        case SourceKind::page_snippet:
            return "page_snippet";
    }
    return "page_result";
}

void ChunkingConfig::validate() const {
    if (chunk_size == 0) {
        throw ConfigError("chunking.chunk_size must be positive");
    }
    if (overlap >= chunk_size) {
        throw ConfigError("chunking.overlap must be smaller than chunking.chunk_size");
    }
}

std::string parse_html(std::string_view html) {
    std::string raw;
    raw.reserve(html.size());
    std::size_t pos = 0;
    while (pos < html.size()) {
        char c = html[pos];
        if (c == '&') {
            auto used = decode_entity(html, pos, raw);
            if (used > 0) {
                pos += used;
            } else {
                raw.push_back('&');
                ++pos;
            }
            continue;
        }
        if (c != '<' || pos + 1 >= html.size()) {
            raw.push_back(c);
            ++pos;
            continue;
        }
        char next = html[pos + 1];
        if (html.compare(pos, 4, "<!--") == 0) {
            auto end = html.find("-->", pos + 4);
            pos = (end == std::string_view::npos) ? html.size() : end + 3;
        } else if (next == '!' || next == '?') {
            pos = skip_tag(html, pos + 2);
        } else if (next == '/' && pos + 2 < html.size() && is_ascii_alpha(html[pos + 2])) {
            std::size_t p = pos + 2;
            auto name = read_tag_name(html, p);
            pos = skip_tag(html, p);
            if (is_block_tag(name)) {
                raw.push_back('\n');
            }
        } else if (is_ascii_alpha(next)) {
            std::size_t p = pos + 1;
            auto name = read_tag_name(html, p);
            pos = skip_tag(html, p);
            if (is_raw_text_tag(name)) {
                // Raw-text element: drop everything up to the matching end tag.
                std::string closer = "</" + name;
                std::size_t scan = pos;
                while (scan < html.size()) {
                    auto lt = html.find('<', scan);
                    if (lt == std::string_view::npos) {
                        scan = html.size();
                        break;
                    }
                    if (starts_with_ci(html, lt, closer)) {
                        scan = skip_tag(html, lt + closer.size());
                        break;
                    }
                    scan = lt + 1;
                }
                pos = scan;
                raw.push_back('\n');
            } else if (is_block_tag(name)) {
                raw.push_back('\n');
            }
        } else {
            raw.push_back('<');
            ++pos;
        }
    }
    return normalize_lines(raw);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        char c = text[pos];
        if (is_html_space(c)) {
            ++pos;
        } else if (is_word_byte(c)) {
            std::size_t start = pos;
            while (pos < text.size() && is_word_byte(text[pos])) {
                ++pos;
            }
            std::string word(text.substr(start, pos - start));
            for (auto& ch : word) {
                if (ch >= 'A' && ch <= 'Z') {
                    ch = static_cast<char>(ch - 'A' + 'a');
                }
            }
            tokens.push_back(std::move(word));
        } else {
            tokens.emplace_back(1, c);
            ++pos;
        }
    }
    return tokens;
}

std::string detokenize(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) {
            out.push_back(' ');
        }
        out.append(tokens[i]);
    }
    return out;
}

std::vector<Chunk> chunk(std::span<const std::string> tokens, const ChunkingConfig& cfg) {
    cfg.validate();
    std::vector<Chunk> chunks;
    if (tokens.empty()) {
        return chunks;
    }
    const std::size_t step = cfg.chunk_size - cfg.overlap;
    std::size_t start = 0;
    while (true) {
        std::size_t end = std::min(start + cfg.chunk_size, tokens.size());
        Chunk c;
        c.id = chunks.size();
        c.text = detokenize(tokens.subspan(start, end - start));
        c.token_count = end - start;
        c.token_offset = start;
        chunks.push_back(std::move(c));
        if (end == tokens.size()) {
            break;
        }
        start += step;
    }
    return chunks;
}

std::vector<Chunk> build_corpus(std::span<const Page> pages, const ChunkingConfig& cfg) {
    cfg.validate();
    std::vector<Chunk> corpus;
    auto append = [&](std::vector<Chunk> chunks, std::size_t page_index, SourceKind kind) {
        for (auto& c : chunks) {
            c.id = corpus.size();
            c.page_index = page_index;
            c.source = kind;
            corpus.push_back(std::move(c));
        }
    };
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const auto& page = pages[i];
        append(chunk(tokenize(parse_html(page.page_html)), cfg), i, SourceKind::page_result);

        // The name is one chunk; only a pathological name longer than the
        // budget is cut, so the size bound still holds.
        auto name_tokens = tokenize(page.page_name);
        if (!name_tokens.empty()) {
            name_tokens.resize(std::min(name_tokens.size(), cfg.chunk_size));
            Chunk name;
            name.text = detokenize(name_tokens);
            name.token_count = name_tokens.size();
            append({std::move(name)}, i, SourceKind::page_name);
        }

        append(chunk(tokenize(page.page_snippet), cfg), i, SourceKind::page_snippet);
    }
    return corpus;
}

}  // namespace webkg
