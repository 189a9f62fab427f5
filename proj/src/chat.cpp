#include "webkg/chat.hpp"

#include <algorithm>
#include <fstream>
#include <vector>

#include "webkg/error.hpp"
#include "webkg/strings.hpp"

namespace webkg {

std::string prompt_hash(std::string_view system, std::string_view user) {
    std::string buf;
    buf.reserve(system.size() + user.size() + 1);
    buf.append(system);
    buf.push_back('\x1e');
    buf.append(user);
    return to_hex(fnv1a64(buf));
}

std::unique_ptr<ScriptedChatModel> ScriptedChatModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open replay file: " + path);
    }
    auto model = std::make_unique<ScriptedChatModel>();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        try {
            auto j = nlohmann::json::parse(line);
            model->add(j.at("prompt_hash").get<std::string>(), j.at("reply").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return model;
}

void ScriptedChatModel::add(std::string hash, std::string reply) {
    replies_[std::move(hash)] = std::move(reply);
}

void ScriptedChatModel::add(const Prompt& prompt, std::string reply) {
    add(prompt_hash(prompt.system, prompt.user), std::move(reply));
}

std::string ScriptedChatModel::send(const std::string& system, const std::string& user) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    auto it = replies_.find(prompt_hash(system, user));
    if (it != replies_.end()) {
        return it->second;
    }
    misses_.fetch_add(1, std::memory_order_relaxed);
    if (strict_) {
        throw BackendError("scripted model has no reply for prompt " + prompt_hash(system, user));
    }
    return fallback_;
}

std::string ScriptedChatModel::to_jsonl() const {
    std::vector<std::pair<std::string, std::string>> rows(replies_.begin(), replies_.end());
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [hash, reply] : rows) {
        out += nlohmann::json{{"prompt_hash", hash}, {"reply", reply}}.dump();
        out += '\n';
    }
    return out;
}

BoundedChatModel::BoundedChatModel(ChatModel& inner, std::ptrdiff_t max_in_flight)
    : inner_(inner), slots_(std::max<std::ptrdiff_t>(1, max_in_flight)) {}

std::string BoundedChatModel::send(const std::string& system, const std::string& user) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{slots_};
    return inner_.send(system, user);
}

namespace {

// End (exclusive) of the balanced JSON value starting at text[start], or npos.
std::size_t balanced_end(std::string_view text, std::size_t start) {
    std::vector<char> stack;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{' || c == '[') {
            stack.push_back(c == '{' ? '}' : ']');
        } else if (c == '}' || c == ']') {
            if (stack.empty() || stack.back() != c) {
                return std::string_view::npos;
            }
            stack.pop_back();
            if (stack.empty()) {
                return i + 1;
            }
        }
    }
    return std::string_view::npos;
}

}  // namespace

std::optional<nlohmann::json> find_json(std::string_view text,
                                        const std::function<bool(const nlohmann::json&)>& accept) {
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        if (text[pos] != '{' && text[pos] != '[') {
            continue;
        }
        auto end = balanced_end(text, pos);
        if (end == std::string_view::npos) {
            continue;
        }
        auto j = nlohmann::json::parse(text.substr(pos, end - pos), nullptr, false);
        if (!j.is_discarded() && accept(j)) {
            return j;
        }
    }
    return std::nullopt;
}

}  // namespace webkg
