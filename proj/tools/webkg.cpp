#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "webkg/app.hpp"
#include "webkg/config.hpp"
#include "webkg/error.hpp"
#include "webkg/kg_service.hpp"

namespace {

std::optional<webkg::ConfidenceTier> tier_option(const std::string& text) {
    if (text.empty()) {
        return std::nullopt;
    }
    auto tier = webkg::parse_confidence(text);
    if (!tier) {
        throw webkg::ConfigError("--threshold must be low, medium or high");
    }
    return tier;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"webkg: web + knowledge-graph question answering"};
    app.require_subcommand(1);

    std::string config_path;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_flag("-v,--verbose", verbose, "print a trace / per-group tables");

    auto* ask = app.add_subcommand("ask", "answer one question over pre-fetched pages");
    std::string pages;
    std::string query;
    std::string query_time;
    std::string threshold;
    ask->add_option("--pages", pages, "record JSON or bare search_results array")->required();
    ask->add_option("-q,--query", query, "question (defaults to the record's)");
    ask->add_option("--query-time", query_time, "query time (defaults to the record's)");
    ask->add_option("--threshold", threshold, "confidence gate: low, medium, high");
    ask->add_flag("-v,--verbose", verbose, "print a trace");

    auto* eval = app.add_subcommand("eval", "evaluate a JSONL dataset");
    std::string dataset;
    std::optional<std::size_t> sample;
    std::optional<std::uint64_t> seed;
    bool sweep = false;
    std::vector<std::size_t> chunk_sizes;
    std::string report;
    eval->add_option("dataset", dataset, "dataset JSONL")->required();
    eval->add_option("--sample", sample, "evaluate a seeded random subset of this size");
    eval->add_option("--seed", seed, "sampling seed");
    eval->add_option("--threshold", threshold, "confidence gate: low, medium, high");
    eval->add_flag("--sweep-thresholds", sweep, "one run per threshold");
    eval->add_option("--chunk-sizes", chunk_sizes, "one run per chunk size")->delimiter(',');
    eval->add_option("--report", report, "write the JSON report here (table beside it as .txt)");
    eval->add_flag("-v,--verbose", verbose, "print per-group tables");

    auto* serve = app.add_subcommand("kg-serve", "serve the mock KG over HTTP (POST /call)");
    std::string bind = "127.0.0.1:8085";
    serve->add_option("--bind", bind, "host:port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : webkg::kExitUsage;
    }

    webkg::AppConfig cfg;
    try {
        cfg = webkg::load_config(config_path);
        if (*ask) {
            webkg::AskOptions opts;
            opts.pages_file = pages;
            if (!query.empty()) {
                opts.query = query;
            }
            if (!query_time.empty()) {
                opts.query_time = query_time;
            }
            opts.threshold = tier_option(threshold);
            opts.verbose = verbose;
            return webkg::cmd_ask(cfg, opts, std::cout, std::cerr);
        }
        if (*eval) {
            webkg::EvalOptions opts;
            opts.dataset = dataset;
            opts.sample = sample;
            opts.seed = seed;
            opts.threshold = tier_option(threshold);
            opts.sweep_thresholds = sweep;
            opts.chunk_sizes = chunk_sizes;
            opts.report_path = report;
            opts.verbose = verbose;
            return webkg::cmd_eval(cfg, opts, std::cout, std::cerr);
        }
        return webkg::cmd_kg_serve(cfg, bind, std::cerr);
    } catch (const webkg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return webkg::kExitUsage;
    }
}
