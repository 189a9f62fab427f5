#include <algorithm>
#include <cmath>
#include <set>

#include "webkg/corpus.hpp"
#include "webkg/dates.hpp"
#include "webkg/kg_workflow.hpp"
#include "webkg/strings.hpp"

namespace webkg {

namespace {

using json = nlohmann::json;
using Kind = PostProcessOutcome::Kind;

bool contains_phrase(const std::string& q, std::string_view phrase) {
    // Phrase match on token boundaries of the canonical query.
    std::size_t pos = 0;
    while ((pos = q.find(phrase, pos)) != std::string::npos) {
        bool left = pos == 0 || q[pos - 1] == ' ';
        std::size_t end = pos + phrase.size();
        bool right = end == q.size() || q[end] == ' ' || q[end] == '?' || q[end] == '.' ||
                     q[end] == ',' || q[end] == '!';
        if (left && right) {
            return true;
        }
        pos = end;
    }
    return false;
}

bool any_phrase(const std::string& q, std::initializer_list<std::string_view> phrases) {
    return std::any_of(phrases.begin(), phrases.end(),
                       [&](std::string_view p) { return contains_phrase(q, p); });
}

enum class Temporal { none, up_to_now, this_year, last_year, today, yesterday };

Temporal temporal_mode(const std::string& q) {
    if (contains_phrase(q, "yesterday")) {
        return Temporal::yesterday;
    }
    if (contains_phrase(q, "this year")) {
        return Temporal::this_year;
    }
    if (contains_phrase(q, "last year")) {
        return Temporal::last_year;
    }
    if (contains_phrase(q, "today")) {
        return Temporal::today;
    }
    if (any_phrase(q, {"so far", "to date", "until now", "up to now", "as of now", "currently",
                       "yet", "ever", "now"})) {
        return Temporal::up_to_now;
    }
    return Temporal::none;
}

// Year or full date carried by a payload item, if any.
struct ItemDate {
    CivilDate date;
    bool year_only = false;
};

std::optional<ItemDate> item_date(const json& item) {
    if (item.is_number_integer()) {
        auto y = item.get<long long>();
        if (y >= 1000 && y <= 2999) {
            return ItemDate{{static_cast<int>(y), 1, 1}, true};
        }
        return std::nullopt;
    }
    if (item.is_string()) {
        const auto& s = item.get_ref<const std::string&>();
        if (auto d = parse_civil_date(s)) {
            return ItemDate{*d, false};
        }
        auto t = trim(s);
        if (t.size() == 4 && std::all_of(t.begin(), t.end(), [](char c) {
                return c >= '0' && c <= '9';
            })) {
            return ItemDate{{std::stoi(std::string(t)), 1, 1}, true};
        }
        return std::nullopt;
    }
    if (item.is_object()) {
        if (auto it = item.find("date"); it != item.end()) {
            return item_date(*it);
        }
        if (auto it = item.find("year"); it != item.end()) {
            return item_date(*it);
        }
    }
    return std::nullopt;
}

bool keep_item(const ItemDate& d, Temporal mode, const CivilDate& now) {
    switch (mode) {
        case Temporal::up_to_now:
        case Temporal::today:
            return d.year_only ? d.date.year <= now.year : d.date <= now;
        case Temporal::this_year:
            return d.date.year == now.year;
        case Temporal::last_year:
            return d.date.year == now.year - 1;
        case Temporal::yesterday:
            return d.year_only ? d.date.year <= now.year : d.date <= previous_day(now);
        case Temporal::none:
            return true;
    }
    return true;
}

bool is_date_keyed(const json& obj) {
    if (!obj.is_object() || obj.empty()) {
        return false;
    }
    return std::all_of(obj.items().begin(), obj.items().end(),
                       [](const auto& kv) { return parse_civil_date(kv.key()).has_value(); });
}

// Returns true when the payload changed.
bool apply_temporal(json& payload, Temporal mode, const CivilDate& now) {
    if (payload.is_array()) {
        json kept = json::array();
        bool dated = false;
        for (const auto& item : payload) {
            auto d = item_date(item);
            if (!d) {
                kept.push_back(item);
                continue;
            }
            dated = true;
            if (keep_item(*d, mode, now)) {
                kept.push_back(item);
            }
        }
        if (!dated || kept.size() == payload.size()) {
            return false;
        }
        payload = std::move(kept);
        return true;
    }
    if (is_date_keyed(payload)) {
        if (mode == Temporal::today || mode == Temporal::yesterday) {
            auto key = (mode == Temporal::today ? now : previous_day(now)).iso();
            json selected = nullptr;
            for (const auto& [k, v] : payload.items()) {
                if (parse_civil_date(k)->iso() == key) {
                    selected = v;
                }
            }
            payload = std::move(selected);
            return true;
        }
        json kept = json::object();
        for (const auto& [k, v] : payload.items()) {
            if (keep_item({*parse_civil_date(k), false}, mode, now)) {
                kept[k] = v;
            }
        }
        bool changed = kept.size() != payload.size();
        payload = std::move(kept);
        return changed;
    }
    return false;
}

// Picks the field of an object payload the query names, e.g. "open" from a
// day's {"open", "close", "volume"} record.
bool select_field(json& payload, const std::set<std::string>& query_tokens) {
    if (!payload.is_object() || payload.empty()) {
        return false;
    }
    std::vector<std::string> hits;
    for (const auto& [key, value] : payload.items()) {
        auto parts = split(to_lower_ascii(key), '_');
        if (std::all_of(parts.begin(), parts.end(),
                        [&](const std::string& p) { return query_tokens.count(p) != 0; })) {
            hits.push_back(key);
        }
    }
    if (hits.size() != 1) {
        return false;
    }
    json v = payload[hits.front()];
    payload = std::move(v);
    return true;
}

std::vector<int> mentioned_years(const std::vector<std::string>& tokens) {
    std::vector<int> years;
    for (const auto& t : tokens) {
        if (t.size() == 4 && std::all_of(t.begin(), t.end(), [](char c) {
                return c >= '0' && c <= '9';
            })) {
            int y = std::stoi(t);
            if (y >= 1800 && y <= 2099) {
                years.push_back(y);
            }
        }
    }
    return years;
}

// All items dated and the year list they carry, or nullopt.
std::optional<std::vector<int>> item_years(const json& payload) {
    if (!payload.is_array() || payload.empty()) {
        return std::nullopt;
    }
    std::vector<int> years;
    for (const auto& item : payload) {
        auto d = item_date(item);
        if (!d) {
            return std::nullopt;
        }
        years.push_back(d->date.year);
    }
    return years;
}

std::optional<double> as_number(const json& v) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_object()) {
        for (const char* key : {"value", "amount", "count"}) {
            if (auto it = v.find(key); it != v.end() && it->is_number()) {
                return it->get<double>();
            }
        }
    }
    return std::nullopt;
}

std::optional<std::vector<double>> numbers_of(const std::vector<json>& payloads) {
    std::vector<double> out;
    if (payloads.size() == 1 && payloads.front().is_array()) {
        for (const auto& item : payloads.front()) {
            auto n = as_number(item);
            if (!n) {
                return std::nullopt;
            }
            out.push_back(*n);
        }
    } else {
        for (const auto& p : payloads) {
            auto n = as_number(p);
            if (!n) {
                return std::nullopt;
            }
            out.push_back(*n);
        }
    }
    if (out.empty()) {
        return std::nullopt;
    }
    return out;
}

std::string format_number(double v) {
    if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    return json(v).dump();
}

bool is_yes_no_question(const std::string& q) {
    static constexpr std::string_view kLeads[] = {"is ", "are ", "was ", "were ", "did ",
                                                  "does ", "do ", "has ", "have ", "can "};
    return std::any_of(std::begin(kLeads), std::end(kLeads),
                       [&](std::string_view lead) { return q.rfind(lead, 0) == 0; });
}

std::optional<std::string> item_name(const json& item) {
    if (item.is_string()) {
        return canonicalize(item.get<std::string>());
    }
    if (item.is_object()) {
        if (auto it = item.find("name"); it != item.end() && it->is_string()) {
            return canonicalize(it->get<std::string>());
        }
    }
    return std::nullopt;
}

PostProcessOutcome make(Kind kind, std::string text, std::vector<std::string> rules) {
    return {kind, std::move(text), std::move(rules)};
}

}  // namespace

std::string render_payload(const json& payload) {
    if (payload.is_null()) {
        return {};
    }
    if (payload.is_string()) {
        return payload.get<std::string>();
    }
    if (payload.is_number()) {
        return format_number(payload.get<double>());
    }
    if (payload.is_boolean()) {
        return payload.get<bool>() ? "yes" : "no";
    }
    if (payload.is_array()) {
        std::vector<std::string> parts;
        for (const auto& item : payload) {
            if (item.is_object() && item.contains("name") && item["name"].is_string()) {
                parts.push_back(item["name"].get<std::string>());
            } else {
                parts.push_back(render_payload(item));
            }
        }
        return join(parts, ", ");
    }
    return payload.dump();
}

PostProcessOutcome post_process(std::span<const KgResult> results, const std::string& query,
                                const std::string& query_time, const PostProcessConfig& cfg) {
    std::vector<std::string> rules;
    if (results.empty() ||
        std::any_of(results.begin(), results.end(), [](const KgResult& r) { return !r.found; })) {
        return make(Kind::no_answer, {}, rules);
    }
    const auto q = canonicalize(query);
    const auto tokens = tokenize(query);
    const std::set<std::string> token_set(tokens.begin(), tokens.end());
    const auto now = parse_civil_date(query_time);
    const auto years = mentioned_years(tokens);

    std::vector<json> payloads;
    for (const auto& r : results) {
        payloads.push_back(r.payload);
    }

    // (1) temporal
    const auto mode = temporal_mode(q);
    if (mode != Temporal::none && now) {
        bool changed = false;
        for (auto& p : payloads) {
            changed |= apply_temporal(p, mode, *now);
        }
        if (changed) {
            rules.emplace_back("temporal");
        }
    }
    for (auto& p : payloads) {
        if (p.is_null()) {
            return make(Kind::no_answer, {}, rules);
        }
        if (select_field(p, token_set)) {
            rules.emplace_back("field");
        }
    }

    std::optional<std::string> answer;
    bool conflict = false;
    const bool counting = any_phrase(q, {"how many", "number of", "count of"}) &&
                          !any_phrase(q, {"how many more", "how many fewer"});

    // (2) numerical
    if (any_phrase(q, {"difference", "how much more", "how much less", "how much higher",
                       "how much lower", "how many more", "how many fewer"})) {
        auto nums = numbers_of(payloads);
        if (nums && nums->size() == 2) {
            answer = format_number(std::fabs((*nums)[0] - (*nums)[1]));
        } else {
            conflict = true;
        }
        rules.emplace_back("numerical");
    } else if (any_phrase(q, {"total", "sum", "combined", "altogether"}) && !counting) {
        auto nums = numbers_of(payloads);
        if (nums) {
            double s = 0.0;
            for (double n : *nums) {
                s += n;
            }
            answer = format_number(s);
        } else {
            conflict = true;
        }
        rules.emplace_back("numerical");
    } else if (any_phrase(q, {"average", "mean"})) {
        auto nums = numbers_of(payloads);
        if (nums) {
            double s = 0.0;
            for (double n : *nums) {
                s += n;
            }
            answer = format_number(s / static_cast<double>(nums->size()));
        } else {
            conflict = true;
        }
        rules.emplace_back("numerical");
    } else if (counting) {
        rules.emplace_back("numerical");
        if (payloads.size() != 1) {
            conflict = true;
        } else if (payloads.front().is_array()) {
            const auto& items = payloads.front();
            std::size_t count = items.size();
            if (auto ys = item_years(items); ys && !years.empty()) {
                count = static_cast<std::size_t>(std::count_if(ys->begin(), ys->end(), [&](int y) {
                    return std::find(years.begin(), years.end(), y) != years.end();
                }));
            }
            answer = std::to_string(count);
        } else if (payloads.front().is_number()) {
            answer = render_payload(payloads.front());
        } else {
            conflict = true;
        }
    }

    // (3) logical
    if (!answer && !conflict) {
        if (payloads.size() >= 2) {
            rules.emplace_back("logical");
            const bool want_max = any_phrase(q, {"more", "most", "larger", "largest", "higher",
                                                 "highest", "bigger", "biggest", "greater",
                                                 "longer", "longest"});
            const bool want_min = any_phrase(q, {"less", "fewer", "least", "smaller", "smallest",
                                                 "lower", "lowest", "shorter", "shortest"});
            const bool want_early = any_phrase(q, {"earlier", "earliest", "first", "before",
                                                   "older", "oldest"});
            const bool want_late = any_phrase(q, {"later", "latest", "more recent", "most recent",
                                                  "newer", "newest", "younger", "youngest"});
            std::vector<double> nums;
            std::vector<CivilDate> dates;
            for (const auto& p : payloads) {
                if (auto n = as_number(p)) {
                    nums.push_back(*n);
                }
                if (auto d = item_date(p)) {
                    dates.push_back(d->date);
                }
            }
            auto pick = [&](std::size_t idx) {
                answer = results[idx].provenance.empty() ? render_payload(payloads[idx])
                                                         : results[idx].provenance.front();
            };
            if (dates.size() == payloads.size() && (want_early || want_late) &&
                !(want_early && want_late)) {
                auto it = want_early ? std::min_element(dates.begin(), dates.end())
                                     : std::max_element(dates.begin(), dates.end());
                if (std::count(dates.begin(), dates.end(), *it) == 1) {
                    pick(static_cast<std::size_t>(it - dates.begin()));
                } else {
                    conflict = true;
                }
            } else if (nums.size() == payloads.size() && (want_max != want_min)) {
                auto it = want_max ? std::max_element(nums.begin(), nums.end())
                                   : std::min_element(nums.begin(), nums.end());
                if (std::count(nums.begin(), nums.end(), *it) == 1) {
                    pick(static_cast<std::size_t>(it - nums.begin()));
                } else {
                    conflict = true;
                }
            } else if (any_phrase(q, {"same", "both", "equal"})) {
                bool same = std::all_of(payloads.begin(), payloads.end(), [&](const json& p) {
                    return render_payload(p) == render_payload(payloads.front());
                });
                answer = same ? "yes" : "no";
            } else {
                conflict = true;
            }
        } else if (is_yes_no_question(q) && payloads.front().is_array()) {
            rules.emplace_back("logical");
            const auto& items = payloads.front();
            if (auto ys = item_years(items); ys && !years.empty()) {
                bool hit = std::any_of(years.begin(), years.end(), [&](int y) {
                    return std::find(ys->begin(), ys->end(), y) != ys->end();
                });
                answer = hit ? "yes" : "no";
            } else {
                bool member = std::any_of(items.begin(), items.end(), [&](const json& item) {
                    auto name = item_name(item);
                    return name && !name->empty() && contains_phrase(q, *name);
                });
                if (member) {
                    answer = "yes";
                } else {
                    conflict = true;
                }
            }
        }
    }

    // (4) false premise: a year the question takes for granted is absent from
    // the year-valued data it asks about.
    if (!counting && !is_yes_no_question(q) && !years.empty() && payloads.size() == 1) {
        if (auto ys = item_years(results.front().payload)) {
            bool any_present = std::any_of(years.begin(), years.end(), [&](int y) {
                return std::find(ys->begin(), ys->end(), y) != ys->end();
            });
            if (!any_present) {
                rules.emplace_back("false_premise");
                return make(Kind::false_premise, cfg.false_premise_response, rules);
            }
        }
    }

    if (conflict) {
        return make(Kind::no_answer, {}, rules);
    }
    if (!answer) {
        if (payloads.size() != 1) {
            return make(Kind::no_answer, {}, rules);
        }
        auto text = render_payload(payloads.front());
        if (trim(text).empty()) {
            return make(Kind::no_answer, {}, rules);
        }
        answer = std::move(text);
    }
    return make(Kind::answer, *answer, rules);
}

}  // namespace webkg
