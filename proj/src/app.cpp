#include "webkg/app.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <thread>

#include "webkg/error.hpp"
#include "webkg/http_backends.hpp"

namespace webkg {

namespace {

HttpEndpoint endpoint(const BackendConfig& b) {
    return HttpEndpoint{b.url, std::chrono::milliseconds(b.timeout_ms)};
}

// Scripted replay when a script is given, HTTP when a URL is given, else an
// empty scripted model whose blank replies every parser rejects.
std::unique_ptr<ChatModel> make_chat(const BackendConfig& b, bool required) {
    if (!b.script.empty()) {
        return ScriptedChatModel::load(b.script);
    }
    if (!b.url.empty()) {
        return std::make_unique<HttpChatModel>(endpoint(b));
    }
    if (required) {
        return std::make_unique<ScriptedChatModel>();
    }
    return nullptr;
}

}  // namespace

Runtime::Runtime(const AppConfig& cfg) : cfg_(cfg), registry_(FunctionRegistry::with_defaults()) {
    cfg_.validate();
    if (cfg_.embedding.url.empty()) {
        embedder_ = std::make_unique<HashingEmbedder>(cfg_.embedding_dimension);
    } else {
        embedder_ = std::make_unique<HttpEmbedder>(endpoint(cfg_.embedding), cfg_.embedding_dimension);
    }
    if (cfg_.rerank.url.empty()) {
        reranker_ = std::make_unique<JaccardReranker>();
    } else {
        reranker_ = std::make_unique<HttpReranker>(endpoint(cfg_.rerank));
    }
    chat_inner_ = make_chat(cfg_.chat, true);
    chat_ = std::make_unique<BoundedChatModel>(*chat_inner_, cfg_.chat.max_in_flight);
    judge_inner_ = make_chat(cfg_.judge, false);
    if (judge_inner_) {
        judge_ = std::make_unique<BoundedChatModel>(*judge_inner_, cfg_.judge.max_in_flight);
    }
    if (!cfg_.kg.url.empty()) {
        kg_backend_ = std::make_unique<HttpKgBackend>(endpoint(cfg_.kg));
    } else if (!cfg_.kg_store_path.empty()) {
        store_ = std::make_unique<KgStore>(KgStore::load(cfg_.kg_store_path));
        kg_backend_ = std::make_unique<LocalKgBackend>(*store_, registry_);
    }
}

std::optional<KgComponents> Runtime::kg() {
    if (!cfg_.kg_enabled || !kg_backend_) {
        return std::nullopt;
    }
    return KgComponents{*chat_, *kg_backend_, registry_};
}

RouterConfig Runtime::router_config(ConfidenceTier threshold) const {
    RouterConfig rc;
    rc.threshold = threshold;
    rc.kg_enabled = cfg_.kg_enabled;
    rc.post.false_premise_response = cfg_.false_premise_response;
    rc.profiles = cfg_.profiles;
    return rc;
}

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const BackendError& e) {
        err << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

std::optional<Dynamism> record_dynamism(const Record& r) {
    if (r.static_or_dynamic.empty()) {
        return std::nullopt;
    }
    return parse_dynamism(r.static_or_dynamic);
}

}  // namespace

int cmd_ask(const AppConfig& cfg, const AskOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Record record = load_pages_file(opts.pages_file);
        if (opts.query) {
            record.query = *opts.query;
        }
        if (opts.query_time) {
            record.query_time = *opts.query_time;
        }
        if (record.query.empty()) {
            throw ConfigError("no question: pass --query or use a pages file holding a record");
        }
        Runtime rt(cfg);
        RetrievalPipeline pipeline(cfg.retrieval, rt.embedder(), rt.reranker(),
                                   &rt.instrumentation());
        Router router(rt.router_config(opts.threshold.value_or(cfg.threshold)), pipeline,
                      rt.chat(), rt.kg(), &rt.instrumentation());
        auto outcome = router.route(
            QueryInput{record.query, record.query_time, record.pages, record_dynamism(record)});
        out << outcome.answer << "\n";
        if (opts.verbose) {
            out << "path: " << to_string(outcome.path) << "\n";
            out << "domain: " << to_string(outcome.domain) << "\n";
            out << "dynamism: " << to_string(outcome.dynamism) << "\n";
            if (!outcome.kg_error.empty()) {
                out << "kg error: " << outcome.kg_error << "\n";
            }
            if (outcome.kg) {
                out << "kg calls: " << outcome.kg->calls.size() << "\n";
            }
            out << "chunks: " << outcome.corpus_chunks << "\n";
            out << "stage1 candidates: " << outcome.stage1_candidates << "\n";
            out << "stage2 candidates: " << outcome.stage2_candidates << "\n";
            out << "references: " << outcome.references.size() << "\n";
            if (outcome.web) {
                out << "confidence: " << to_string(outcome.web->confidence)
                    << (outcome.web->accepted ? " (accepted)" : " (rejected)") << "\n";
            } else if (outcome.kg) {
                out << "confidence: " << to_string(outcome.kg->confidence) << " (kg)\n";
            }
        }
        return static_cast<int>(kExitOk);
    });
}

std::vector<std::size_t> sample_indices(std::size_t total, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) {
        idx[i] = i;
    }
    if (count >= total) {
        return idx;
    }
    // mt19937_64 output is fixed by the standard; the distribution is not, so
    // draw bounded integers by rejection here.
    std::mt19937_64 rng(seed);
    auto below = [&rng](std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = rng();
        } while (x >= limit);
        return x % bound;
    };
    for (std::size_t i = 0; i < count; ++i) {
        auto j = i + static_cast<std::size_t>(below(total - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

ItemResult evaluate_record(const Record& record, const Router& router, ChatModel* judge_model,
                           const JudgeConfig& jcfg) {
    ItemResult item;
    item.id = record.id;
    item.query = record.query;
    item.domain = record.domain;
    item.question_type = record.question_type;
    item.ground_truth = record.answer.value_or("");
    try {
        auto outcome = router.route(
            QueryInput{record.query, record.query_time, record.pages, record_dynamism(record)});
        item.response = outcome.answer;
        item.path = std::string(to_string(outcome.path));
        item.dynamism = std::string(to_string(outcome.dynamism));
        if (item.domain.empty()) {
            item.domain = std::string(to_string(outcome.domain));
        }
        if (outcome.web) {
            item.confidence = std::string(to_string(outcome.web->confidence));
            item.accepted = outcome.web->accepted;
        } else if (outcome.kg) {
            item.confidence = std::string(to_string(outcome.kg->confidence));
            item.accepted = true;
        }
    } catch (const Error& e) {
        item.error = e.what();
        return item;
    }
    if (!record.answer) {
        return item;
    }
    auto j = judge(record.query, item.response, *record.answer, judge_model, jcfg);
    item.verdict = j.verdict;
    item.exact_match = j.exact_match;
    return item;
}

std::vector<ItemResult> evaluate_all(const std::vector<Record>& records, const Router& router,
                                     ChatModel* judge_model, const JudgeConfig& jcfg,
                                     std::size_t workers) {
    std::vector<ItemResult> items(records.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < records.size(); i = next++) {
            items[i] = evaluate_record(records[i], router, judge_model, jcfg);
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(records.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    return items;
}

}  // namespace

EvalOutput run_eval(const AppConfig& cfg, const EvalOptions& opts) {
    auto all = load_dataset(opts.dataset);
    const auto seed = opts.seed.value_or(cfg.seed);
    std::vector<Record> records;
    for (auto i : sample_indices(all.size(), opts.sample.value_or(all.size()), seed)) {
        records.push_back(std::move(all[i]));
    }

    std::vector<ConfidenceTier> tiers;
    if (opts.sweep_thresholds) {
        tiers = {ConfidenceTier::low, ConfidenceTier::medium, ConfidenceTier::high};
    } else {
        tiers = {opts.threshold.value_or(cfg.threshold)};
    }
    std::vector<std::size_t> sizes = opts.chunk_sizes;
    const bool size_sweep = !sizes.empty();
    if (!size_sweep) {
        sizes = {cfg.retrieval.chunking.chunk_size};
    }

    EvalOutput result;
    if (opts.sweep_thresholds && !size_sweep) {
        result.first_column = "Threshold";
    } else if (size_sweep && !opts.sweep_thresholds) {
        result.first_column = "Chunk size";
    } else {
        result.first_column = "Run";
    }

    Runtime rt(cfg);
    JudgeConfig jcfg{cfg.false_premise_as_missing, cfg.false_premise_response};
    for (auto size : sizes) {
        RetrievalConfig rcfg = cfg.retrieval;
        rcfg.chunking.chunk_size = size;
        rcfg.validate();
        RetrievalPipeline pipeline(rcfg, rt.embedder(), rt.reranker(), &rt.instrumentation());
        for (auto tier : tiers) {
            Router router(rt.router_config(tier), pipeline, rt.chat(), rt.kg(),
                          &rt.instrumentation());
            RunReport run;
            run.threshold = std::string(to_string(tier));
            run.chunk_size = size;
            if (result.first_column == "Threshold") {
                run.label = run.threshold;
            } else if (result.first_column == "Chunk size") {
                run.label = std::to_string(size);
            } else {
                run.label = "threshold=" + run.threshold + " chunk_size=" + std::to_string(size);
            }
            run.items = evaluate_all(records, router, rt.judge(), jcfg, cfg.worker_count);
            summarize(run);
            result.runs.push_back(std::move(run));
        }
    }

    result.report = nlohmann::ordered_json::object();
    result.report["records"] = records.size();
    result.report["seed"] = seed;
    result.report["sample"] = opts.sample ? nlohmann::ordered_json(*opts.sample) : nlohmann::ordered_json();
    result.report["runs"] = nlohmann::ordered_json::array();
    for (const auto& run : result.runs) {
        result.report["runs"].push_back(to_json(run));
    }
    result.table = format_metrics_table(result.runs, result.first_column);
    return result;
}

int cmd_eval(const AppConfig& cfg, const EvalOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto result = run_eval(cfg, opts);
        out << result.table;
        std::size_t unjudged = 0;
        std::size_t failed = 0;
        for (const auto& run : result.runs) {
            unjudged += run.unjudged;
            failed += run.failed;
            if (opts.verbose) {
                out << "\n" << run.label << format_group_tables(run);
            }
        }
        if (unjudged + failed > 0) {
            err << "warning: " << failed << " failed and " << unjudged
                << " unjudged items excluded from rates\n";
        }
        if (!opts.report_path.empty()) {
            std::ofstream report(opts.report_path, std::ios::binary);
            if (!report) {
                throw DataError("cannot write report: " + opts.report_path);
            }
            report << result.report.dump(2) << "\n";
            std::ofstream table(opts.report_path + ".txt", std::ios::binary);
            if (!table) {
                throw DataError("cannot write table: " + opts.report_path + ".txt");
            }
            table << result.table;
        }
        return static_cast<int>(kExitOk);
    });
}

}  // namespace webkg
