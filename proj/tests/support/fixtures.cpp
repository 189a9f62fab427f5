#include "fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "webkg/dense_retrieval.hpp"
#include "webkg/generation.hpp"
#include "webkg/kg_workflow.hpp"
#include "webkg/retrieval_pipeline.hpp"
#include "webkg/router.hpp"
#include "webkg/strings.hpp"

#ifndef WEBKG_TEST_DATA_DIR
#define WEBKG_TEST_DATA_DIR "tests/data"
#endif

namespace webkg::test {

namespace fs = std::filesystem;

std::string data_dir() { return WEBKG_TEST_DATA_DIR; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

namespace {

const std::vector<std::string>& filler_vocabulary() {
    static const std::vector<std::string> words = {
        "the",     "a",        "of",      "and",     "to",      "in",      "is",      "was",
        "for",     "on",       "with",    "as",      "by",      "at",      "from",    "that",
        "this",    "it",       "an",      "be",      "are",     "or",      "which",   "new",
        "city",    "river",    "market",  "report",  "season",  "people",  "early",   "late",
        "north",   "south",    "water",   "road",    "house",   "school",  "museum",  "garden",
        "history", "council",  "local",   "century", "village", "station", "harbor",  "forest",
        "summer",  "winter",   "annual",  "public",  "small",   "large",   "old",     "modern",
        "during",  "after",    "before",  "between", "many",    "several", "visitors", "traders",
        "festival", "bridge",  "hall",    "library", "square",  "tower",   "valley",  "island",
        "weather", "farmers",  "records", "archive", "survey",  "project", "plan",    "meeting",
        "music",   "film",     "team",    "game",    "price",   "stock",   "company", "album",
        "local",   "regional", "national", "famous", "quiet",   "busy",    "stone",   "wooden",
    };
    return words;
}

const std::vector<std::string>& syllables() {
    static const std::vector<std::string> s = {"zor", "blax", "quil", "fen", "mar", "tav",
                                               "orn", "vek",  "sil",  "dra", "nym", "thu",
                                               "kel", "mora", "pri",  "wex", "ula", "gand"};
    return s;
}

std::string made_up_word(std::mt19937_64& rng, std::size_t parts) {
    std::string w;
    for (std::size_t i = 0; i < parts; ++i) {
        w += syllables()[pick(rng, syllables().size())];
    }
    return w;
}

std::string sentence_block(std::mt19937_64& rng, std::size_t n) {
    return join(filler_words(rng, n), " ");
}

}  // namespace

std::vector<std::string> filler_words(std::mt19937_64& rng, std::size_t n) {
    const auto& vocab = filler_vocabulary();
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(vocab[pick(rng, vocab.size())]);
    }
    return out;
}

std::string paragraphs_html(const std::vector<std::string>& paragraphs) {
    std::string html = "<html><head><title>t</title><script>var x = 1;</script></head><body>";
    for (const auto& p : paragraphs) {
        html += "<p>" + p + "</p>\n";
    }
    html += "</body></html>";
    return html;
}

std::vector<Page> random_pages(std::mt19937_64& rng, std::size_t pages, std::size_t max_tokens,
                               std::size_t vocab) {
    std::vector<Page> out;
    for (std::size_t p = 0; p < pages; ++p) {
        auto words = 1 + pick(rng, max_tokens);
        std::vector<std::string> paragraphs;
        std::string current;
        for (std::size_t w = 0; w < words; ++w) {
            if (!current.empty()) {
                current += ' ';
            }
            current += "w" + std::to_string(pick(rng, vocab));
            if (pick(rng, 40) == 0) {
                paragraphs.push_back(std::move(current));
                current.clear();
            }
        }
        if (!current.empty()) {
            paragraphs.push_back(std::move(current));
        }
        Page page;
        page.page_name = "w" + std::to_string(pick(rng, vocab)) + " w" + std::to_string(pick(rng, vocab));
        page.page_html = paragraphs_html(paragraphs);
        page.page_snippet = pick(rng, 3) == 0 ? "" : "w" + std::to_string(pick(rng, vocab));
        out.push_back(std::move(page));
    }
    return out;
}

SentinelCase sentinel_case(std::uint64_t seed, std::size_t page_count) {
    std::mt19937_64 rng(seed);
    SentinelCase c;
    const auto thing = made_up_word(rng, 3);
    const auto person = made_up_word(rng, 2) + " " + made_up_word(rng, 3);
    const auto year = std::to_string(1700 + pick(rng, 300));
    c.fact = "the " + thing + " crystal was first catalogued in " + year + " by " + person;
    c.query = "who first catalogued the " + thing + " crystal?";
    c.page_index = pick(rng, page_count);
    for (std::size_t p = 0; p < page_count; ++p) {
        std::vector<std::string> paragraphs;
        const auto count = 2 + pick(rng, 5);
        for (std::size_t i = 0; i < count; ++i) {
            paragraphs.push_back(sentence_block(rng, 20 + pick(rng, 50)));
        }
        if (pick(rng, 4) == 0) {
            // Decoys: the common query words without the planted name.
            paragraphs.insert(paragraphs.begin() + static_cast<std::ptrdiff_t>(pick(rng, paragraphs.size())),
                              "a crystal was first catalogued by the " + made_up_word(rng, 2) +
                                  " survey in " + std::to_string(1700 + pick(rng, 300)));
        }
        if (p == c.page_index) {
            paragraphs.insert(paragraphs.begin() + static_cast<std::ptrdiff_t>(pick(rng, paragraphs.size() + 1)),
                              c.fact + ".");
        }
        Page page;
        page.page_name = "page " + std::to_string(p) + " " + sentence_block(rng, 3);
        page.page_html = paragraphs_html(paragraphs);
        page.page_snippet = sentence_block(rng, 12);
        c.pages.push_back(std::move(page));
    }
    return c;
}

KgStore fixture_store() { return KgStore::load(data_dir() + "/kg_store.jsonl"); }

nlohmann::json record_json(const Record& r) {
    nlohmann::json pages = nlohmann::json::array();
    for (const auto& p : r.pages) {
        pages.push_back({{"page_name", p.page_name},
                         {"page_snippet", p.page_snippet},
                         {"page_result", p.page_html}});
    }
    nlohmann::json j{{"interaction_id", r.id},
                     {"query", r.query},
                     {"query_time", r.query_time},
                     {"domain", r.domain},
                     {"static_or_dynamic", r.static_or_dynamic},
                     {"question_type", r.question_type},
                     {"search_results", pages}};
    if (r.answer) {
        j["answer"] = *r.answer;
    }
    return j;
}

void write_jsonl(const std::string& path, const std::vector<Record>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    for (const auto& r : records) {
        out << record_json(r).dump() << "\n";
    }
}

std::string RecordingChatModel::send(const std::string& system, const std::string& user) {
    auto reply = fn_(system, user);
    std::lock_guard lock(mu_);
    replay_.add(Prompt{system, user}, reply);
    return reply;
}

std::string question_of(const std::string& user) {
    const std::string tag = "\nQuestion: ";
    auto pos = user.rfind(tag);
    if (pos == std::string::npos) {
        return user;
    }
    auto start = pos + tag.size();
    auto end = user.find("\nOutput:", start);
    return user.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::string answer_reply(const std::string& answer, std::string_view confidence) {
    return nlohmann::json{{"answer", answer}, {"confidence", confidence}}.dump();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

}  // namespace

EvalFixture write_gate_sweep_fixture(const std::string& dir) {
    fs::create_directories(dir);
    EvalFixture fx;
    fx.dir = dir;
    fx.dataset = dir + "/dataset.jsonl";
    fx.config = dir + "/config.json";
    fx.replay = dir + "/replay.jsonl";

    std::mt19937_64 rng(60);
    std::map<std::string, std::string> replies;
    for (std::size_t i = 0; i < 60; ++i) {
        Record r;
        r.id = "q" + std::to_string(i);
        r.query = "what is the label of item " + std::to_string(i) + "?";
        r.query_time = "2024-03-04";
        r.domain = "open";
        r.static_or_dynamic = "static";
        r.question_type = i % 2 == 0 ? "simple" : "comparison";
        const std::string label = "label" + std::to_string(i);
        r.answer = label;
        for (int p = 0; p < 3; ++p) {
            Page page;
            page.page_name = "item " + std::to_string(i) + " page " + std::to_string(p);
            page.page_html = paragraphs_html({sentence_block(rng, 40), "item " + std::to_string(i) +
                                                                           " is tagged " + label});
            page.page_snippet = sentence_block(rng, 8);
            r.pages.push_back(std::move(page));
        }
        // (right, wrong) x (high, medium, low); every other right answer is a
        // sentence, so it is judged correct without matching exactly.
        static constexpr std::string_view kTiers[] = {"high", "medium", "low"};
        const auto slot = i % 6;
        const bool right = slot < 3;
        std::string answer = right ? label : "nothing" + std::to_string(i);
        if (right && (i / 6) % 2 == 1) {
            answer = "It is " + label + ".";
        }
        replies[r.query] = answer_reply(answer, kTiers[slot % 3]);
        fx.records.push_back(std::move(r));
    }
    write_jsonl(fx.dataset, fx.records);

    RecordingChatModel model([&](const std::string&, const std::string& user) {
        auto it = replies.find(question_of(user));
        return it == replies.end() ? std::string() : it->second;
    });
    HashingEmbedder embedder;
    JaccardReranker reranker;
    RetrievalPipeline pipeline(RetrievalConfig{}, embedder, reranker);
    RouterConfig rc;
    rc.kg_enabled = false;
    Router router(rc, pipeline, model, std::nullopt);
    for (const auto& r : fx.records) {
        router.route(QueryInput{r.query, r.query_time, r.pages, parse_dynamism(r.static_or_dynamic)});
    }
    write_text(fx.replay, model.replay().to_jsonl());
    write_text(fx.config, nlohmann::json{{"kg_enabled", false},
                                         {"worker_count", 4},
                                         {"backends", {{"chat", {{"script", "replay.jsonl"}}}}}}
                              .dump(2));
    return fx;
}

namespace {

struct E2eSpec {
    std::string query;
    std::string query_time;
    std::string domain;
    std::string dynamism;
    std::string question_type;
    std::string answer;
    std::string classification;  // classifier reply
    std::string call;            // function-call reply; empty for open questions
    std::string fact;            // planted in the pages when non-empty
    std::string web_reply;       // fixed web reply overriding the context rule
};

std::vector<E2eSpec> e2e_specs() {
    const std::string music = R"({"domain": "music", "certainty": 0.97})";
    const std::string finance = R"({"domain": "finance", "certainty": 0.95})";
    const std::string sports = R"({"domain": "sports", "certainty": 0.93})";
    const std::string movie = R"({"domain": "movie", "certainty": 0.96})";
    const std::string open = R"({"domain": "open", "certainty": 0.99})";
    return {
        {"what is justin bieber's birthday?", "2024-03-04", "music", "static", "simple",
         "1994-03-01", music,
         R"({"name": "get_artist_info", "params": {"artist_name": "justin bieber", "artist_information": "birthday"}})",
         "", ""},
        {"where was taylor swift born?", "2024-03-04", "music", "static", "simple",
         "West Reading, Pennsylvania", music,
         R"(get_artist_info(artist_name="taylor swift", artist_information="birthplace"))", "", ""},
        {"how many albums has justin bieber released so far?", "03/04/2024, 10:00:00 PT", "music",
         "slow-changing", "aggregation", "5", music,
         R"(get_artist_info(artist_name="justin bieber", artist_information="all_works"))", "", ""},
        {"who is the author of shape of you?", "2024-03-04", "music", "static", "simple",
         "Ed Sheeran", music,
         R"({"name": "get_song_info", "params": {"song_name": "shape of you", "song_information": "author"}})",
         "", ""},
        {"how many grammy awards has taylor swift won?", "2024-03-04", "music", "slow-changing",
         "simple", "14", music,
         R"(get_artist_info(artist_name="taylor swift", artist_information="grammy count"))",
         "", ""},
        {"which grammy did justin bieber win in 2019?", "2024-03-04", "music", "static",
         "false_premise", "invalid question", music,
         R"(get_artist_info(artist_name="justin bieber", artist_information="grammy_year"))", "",
         ""},
        {"what was funko's open price today?", "03/04/2024, 09:30:00 PT", "finance", "real-time",
         "simple_w_condition", "6.3", finance,
         R"({"name": "get_company_info", "params": {"company_name": "funko", "company_information": "price_history"}})",
         "", ""},
        {"what is the difference in market cap between apple and microsoft?", "2024-03-04",
         "finance", "real-time", "comparison", "300000000000", finance,
         R"([{"name": "get_company_info", "params": {"company_name": "apple", "company_information": "market_cap"}}, {"name": "get_company_info", "params": {"company_name": "microsoft", "company_information": "market_cap"}}])",
         "", ""},
        {"what is the ticker symbol of funko?", "2024-03-04", "finance", "real-time", "simple",
         "FNKO", R"({"domain": "finance", "certainty": 0.6})", "",
         "funko trades on the nasdaq under the ticker symbol fnko", ""},
        {"how many championships have the boston celtics won?", "2024-03-04", "sports",
         "fast-changing", "simple", "18", sports,
         R"(get_team_info(team_name="boston celtics", team_information="championships"))", "", ""},
        {"did the boston celtics win the championship in 2008?", "2024-03-04", "sports",
         "fast-changing", "simple_w_condition", "yes", sports,
         R"(get_team_info(team_name="boston celtics", team_information="championship_years"))", "",
         ""},
        {"what is the total budget of the movies directed by christopher nolan?", "2024-03-04",
         "movie", "slow-changing", "multi-hop", "325000000", movie,
         R"([{"name": "get_person_info", "params": {"person_name": "christopher nolan", "person_information": "directed"}}, {"name": "get_movie_info", "params": {"movie_name": "$prev", "movie_information": "budget"}}])",
         "", ""},
        {"which movie came out earlier, inception or interstellar?", "2024-03-04", "movie",
         "static", "comparison", "Inception", movie,
         R"([{"name": "get_movie_info", "params": {"movie_name": "inception", "movie_information": "release_year"}}, {"name": "get_movie_info", "params": {"movie_name": "interstellar", "movie_information": "release_year"}}])",
         "", ""},
        {"when was the lighthouse at kelmora point built?", "2024-03-04", "open", "static",
         "simple", "1873", open, "", "the lighthouse at kelmora point was built in 1873", ""},
        {"what river runs through the town of vekthu?", "2024-03-04", "open", "static", "simple",
         "Silmar", open, "", "the silmar river runs through the town of vekthu", ""},
        {"who founded the quilfen botanical society?", "2024-03-04", "open", "static", "simple",
         "Ada Pritav", open, "", "the quilfen botanical society was founded by ada pritav", ""},
        {"how tall is the drawex clock tower in meters?", "2024-03-04", "open", "slow-changing",
         "simple", "64", open, "", "the drawex clock tower is 64 meters tall", ""},
        {"what is the national dish of ulagand?", "2024-03-04", "open", "static", "simple",
         "Orn stew", open, "", "the national dish of ulagand is orn stew", ""},
        {"what colour is the flag of nymora?", "2024-03-04", "open", "static", "simple", "green",
         open, "", "", R"({"answer": "blue", "confidence": "medium"})"},
        {"who painted the mural in the tavorn station?", "2024-03-04", "open", "static", "simple",
         "Wex Marsil", open, "", "", "Sorry, I cannot help with that."},
    };
}

}  // namespace

EvalFixture write_e2e_fixture(const std::string& dir) {
    fs::create_directories(dir);
    EvalFixture fx;
    fx.dir = dir;
    fx.dataset = dir + "/dataset.jsonl";
    fx.config = dir + "/config.json";
    fx.replay = dir + "/replay.jsonl";

    const auto specs = e2e_specs();
    std::map<std::string, const E2eSpec*> by_query;
    std::mt19937_64 rng(20);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        by_query[s.query] = &s;
        Record r;
        r.id = "e" + std::to_string(i);
        r.query = s.query;
        r.query_time = s.query_time;
        r.domain = s.domain;
        r.static_or_dynamic = s.dynamism;
        r.question_type = s.question_type;
        r.answer = s.answer;
        const auto fact_page = pick(rng, 6);
        for (std::size_t p = 0; p < 6; ++p) {
            std::vector<std::string> paragraphs;
            const auto count = 3 + pick(rng, 8);
            for (std::size_t k = 0; k < count; ++k) {
                paragraphs.push_back(sentence_block(rng, 30 + pick(rng, 90)));
            }
            if (!s.fact.empty() && p == fact_page) {
                paragraphs.insert(paragraphs.begin() + static_cast<std::ptrdiff_t>(pick(rng, count + 1)),
                                  s.fact + ".");
            }
            Page page;
            page.page_name = s.domain + " page " + std::to_string(p);
            page.page_html = paragraphs_html(paragraphs);
            page.page_snippet = sentence_block(rng, 15);
            r.pages.push_back(std::move(page));
        }
        fx.records.push_back(std::move(r));
    }
    write_jsonl(fx.dataset, fx.records);

    RecordingChatModel model([&](const std::string& system, const std::string& user) -> std::string {
        if (system == classification_system_prompt()) {
            auto it = by_query.find(user);
            return it == by_query.end() ? std::string() : it->second->classification;
        }
        if (system == answer_system_prompt()) {
            auto it = by_query.find(question_of(user));
            if (it == by_query.end()) {
                return {};
            }
            const auto& s = *it->second;
            if (!s.web_reply.empty()) {
                return s.web_reply;
            }
            auto context = to_lower_ascii(user.substr(0, user.rfind("\nQuestion: ")));
            if (context.find(to_lower_ascii(s.answer)) != std::string::npos) {
                return answer_reply(s.answer, "high");
            }
            return answer_reply("I don't know", "low");
        }
        auto it = by_query.find(user);
        return it == by_query.end() ? std::string() : it->second->call;
    });

    auto store = fixture_store();
    auto registry = FunctionRegistry::with_defaults();
    LocalKgBackend backend(store, registry);
    HashingEmbedder embedder;
    JaccardReranker reranker;
    for (std::size_t size : {300, 500, 750, 1000}) {
        RetrievalConfig rcfg;
        rcfg.chunking.chunk_size = size;
        RetrievalPipeline pipeline(rcfg, embedder, reranker);
        Router router(RouterConfig{}, pipeline, model, KgComponents{model, backend, registry});
        for (const auto& r : fx.records) {
            router.route(
                QueryInput{r.query, r.query_time, r.pages, parse_dynamism(r.static_or_dynamic)});
        }
    }
    write_text(fx.replay, model.replay().to_jsonl());
    write_text(fx.config,
               nlohmann::json{{"kg_store_path", fs::absolute(data_dir() + "/kg_store.jsonl").string()},
                              {"worker_count", 4},
                              {"seed", 7},
                              {"backends", {{"chat", {{"script", "replay.jsonl"}}}}}}
                   .dump(2));
    return fx;
}

}  // namespace webkg::test

namespace webkg::test {

std::string join_words(const std::vector<std::string>& words) { return join(words, " "); }

}  // namespace webkg::test
