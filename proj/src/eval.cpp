#include "webkg/eval.hpp"

#include <cstdio>
#include <stdexcept>

#include "webkg/error.hpp"
#include "webkg/strings.hpp"

namespace webkg {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::correct:
            return "correct";
        case Verdict::missing:
            return "missing";
        case Verdict::incorrect:
            return "incorrect";
    }
    return "missing";
}

int points(Verdict v) {
    switch (v) {
        case Verdict::correct:
            return 1;
        case Verdict::missing:
            return 0;
        case Verdict::incorrect:
            return -1;
    }
    return 0;
}

std::string normalize_answer(std::string_view s) {
    return to_lower_ascii(trim(s));
}

const std::string& judge_system_prompt() {
    static const std::string kPrompt =
        "You are an evaluator. You are given a question, the ground truth answer and a "
        "prediction. Decide whether the prediction is correct: it must state the same fact as "
        "the ground truth without contradicting it. Output the result in JSON format, for "
        "example output: {\"accuracy\": true}";
    return kPrompt;
}

Judgement judge(const std::string& question, const std::string& response,
                const std::string& ground_truth, ChatModel* judge_model, const JudgeConfig& cfg) {
    Judgement j;
    const auto r = normalize_answer(response);
    const auto gt = normalize_answer(ground_truth);
    if (r == "i don't know" ||
        (cfg.false_premise_as_missing && r == normalize_answer(cfg.false_premise_response))) {
        j.verdict = Verdict::missing;
        return j;
    }
    if (r == gt) {
        j.verdict = Verdict::correct;
        j.exact_match = true;
        return j;
    }
    if (judge_model != nullptr) {
        std::string user = "Question: " + question + "\nGround truth: " + ground_truth +
                           "\nPrediction: " + response + "\nOutput:";
        try {
            auto reply = judge_model->send(judge_system_prompt(), user);
            auto parsed = find_json(reply, [](const nlohmann::json& v) {
                return v.is_object() && ((v.contains("accuracy") && v["accuracy"].is_boolean()) ||
                                         (v.contains("score") && v["score"].is_number()));
            });
            if (!parsed) {
                j.note = "judge reply unparseable";
                return j;
            }
            bool ok = parsed->contains("accuracy") ? (*parsed)["accuracy"].get<bool>()
                                                   : (*parsed)["score"].get<double>() > 0.5;
            j.verdict = ok ? Verdict::correct : Verdict::incorrect;
        } catch (const BackendError& e) {
            j.note = std::string("judge backend failed: ") + e.what();
        }
        return j;
    }
    j.verdict = (!gt.empty() && r.find(gt) != std::string::npos) ? Verdict::correct
                                                                 : Verdict::incorrect;
    return j;
}

Metrics aggregate(std::span<const Verdict> verdicts, std::size_t exact_matches) {
    if (verdicts.empty()) {
        throw std::invalid_argument("aggregate: no verdicts");
    }
    Metrics m;
    m.total = verdicts.size();
    for (auto v : verdicts) {
        switch (v) {
            case Verdict::correct:
                ++m.correct;
                break;
            case Verdict::incorrect:
                ++m.incorrect;
                break;
            case Verdict::missing:
                ++m.missing;
                break;
        }
    }
    m.exact = exact_matches;
    const auto n = static_cast<double>(m.total);
    m.accuracy = static_cast<double>(m.correct) / n;
    m.hallucination = static_cast<double>(m.incorrect) / n;
    m.missing_rate = static_cast<double>(m.missing) / n;
    // From counts, so the rate identities hold as exactly as doubles allow.
    m.score = static_cast<double>(static_cast<long long>(m.correct) -
                                  static_cast<long long>(m.incorrect)) / n;
    m.exact_accuracy = static_cast<double>(m.exact) / n;
    return m;
}

nlohmann::ordered_json to_json(const Metrics& m) {
    return {{"total", m.total},
            {"correct", m.correct},
            {"incorrect", m.incorrect},
            {"missing", m.missing},
            {"exact", m.exact},
            {"exact_accuracy", m.exact_accuracy},
            {"accuracy", m.accuracy},
            {"hallucination", m.hallucination},
            {"missing_rate", m.missing_rate},
            {"score", m.score}};
}

void summarize(RunReport& run) {
    std::vector<Verdict> verdicts;
    std::size_t exact = 0;
    run.unjudged = 0;
    run.failed = 0;
    std::map<std::string, std::map<std::string, std::pair<std::vector<Verdict>, std::size_t>>>
        grouped;
    for (const auto& item : run.items) {
        if (!item.error.empty()) {
            ++run.failed;
            continue;
        }
        if (!item.verdict) {
            ++run.unjudged;
            continue;
        }
        verdicts.push_back(*item.verdict);
        exact += item.exact_match ? 1 : 0;
        for (const auto& [field, value] :
             {std::pair<std::string, const std::string*>{"domain", &item.domain},
              {"dynamism", &item.dynamism},
              {"question_type", &item.question_type}}) {
            if (value->empty()) {
                continue;
            }
            auto& slot = grouped[field][*value];
            slot.first.push_back(*item.verdict);
            slot.second += item.exact_match ? 1 : 0;
        }
    }
    run.metrics.reset();
    if (!verdicts.empty()) {
        run.metrics = aggregate(verdicts, exact);
    }
    run.groups.clear();
    for (const auto& [field, values] : grouped) {
        for (const auto& [value, slot] : values) {
            run.groups[field][value] = aggregate(slot.first, slot.second);
        }
    }
}

nlohmann::ordered_json to_json(const RunReport& run, bool include_items) {
    nlohmann::ordered_json j;
    j["label"] = run.label;
    j["threshold"] = run.threshold;
    j["chunk_size"] = run.chunk_size;
    j["metrics"] = run.metrics ? to_json(*run.metrics) : nlohmann::ordered_json(nullptr);
    j["unjudged"] = run.unjudged;
    j["failed"] = run.failed;
    nlohmann::ordered_json groups = nlohmann::ordered_json::object();
    for (const auto& [field, values] : run.groups) {
        for (const auto& [value, m] : values) {
            groups[field][value] = to_json(m);
        }
    }
    j["groups"] = groups;
    if (include_items) {
        nlohmann::ordered_json items = nlohmann::ordered_json::array();
        for (const auto& it : run.items) {
            nlohmann::ordered_json item{{"id", it.id},
                                        {"query", it.query},
                                        {"domain", it.domain},
                                        {"dynamism", it.dynamism},
                                        {"question_type", it.question_type},
                                        {"response", it.response},
                                        {"ground_truth", it.ground_truth},
                                        {"verdict", it.verdict ? std::string(to_string(*it.verdict))
                                                               : std::string("unjudged")},
                                        {"exact_match", it.exact_match},
                                        {"path", it.path},
                                        {"confidence", it.confidence},
                                        {"accepted", it.accepted}};
            if (!it.error.empty()) {
                item["error"] = it.error;
            }
            items.push_back(std::move(item));
        }
        j["items"] = std::move(items);
    }
    return j;
}

namespace {

std::string row(std::string_view name, const std::optional<Metrics>& m, std::size_t width) {
    char buf[256];
    if (!m) {
        std::snprintf(buf, sizeof buf, "%-*.*s %14s %10s %14s %9s %9s\n", static_cast<int>(width),
                      static_cast<int>(name.size()), name.data(), "-", "-", "-", "-", "-");
    } else {
        std::snprintf(buf, sizeof buf, "%-*.*s %14.4f %10.4f %14.4f %9.4f %9.4f\n",
                      static_cast<int>(width), static_cast<int>(name.size()), name.data(),
                      m->exact_accuracy, m->accuracy, m->hallucination, m->missing_rate, m->score);
    }
    return buf;
}

std::string header(std::string_view first, std::size_t width) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*.*s %14s %10s %14s %9s %9s\n", static_cast<int>(width),
                  static_cast<int>(first.size()), first.data(), "Exact Accuracy", "Accuracy",
                  "Hallucination", "Missing", "Score");
    return buf;
}

}  // namespace

std::string format_metrics_table(std::span<const RunReport> runs, std::string_view first_column) {
    std::size_t width = first_column.size();
    for (const auto& r : runs) {
        width = std::max(width, r.label.size());
    }
    std::string out = header(first_column, width);
    for (const auto& r : runs) {
        out += row(r.label, r.metrics, width);
    }
    return out;
}

std::string format_group_tables(const RunReport& run) {
    std::string out;
    for (const auto& [field, values] : run.groups) {
        std::size_t width = field.size();
        for (const auto& [value, m] : values) {
            width = std::max(width, value.size());
        }
        out += "\n" + header(field, width);
        for (const auto& [value, m] : values) {
            out += row(value, m, width);
        }
    }
    return out;
}

}  // namespace webkg
