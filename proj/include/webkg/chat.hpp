#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace webkg {

struct Prompt {
    std::string system;
    std::string user;
};

// Synchronous chat completion at temperature 0. Implementations throw
// BackendError for transport failures; a reply that fails to parse is the
// caller's concern, not an error here.
class ChatModel {
public:
    virtual ~ChatModel() = default;
    virtual std::string send(const std::string& system, const std::string& user) = 0;

    std::string send(const Prompt& p) { return send(p.system, p.user); }
};

// Key used by replay files: hex FNV-1a-64 of system + '\x1e' + user.
std::string prompt_hash(std::string_view system, std::string_view user);

// Replays canned replies keyed by prompt hash. Unknown prompts get the
// fallback reply (empty by default, which every parser treats as unusable),
// or throw BackendError in strict mode. Read-only after setup.
class ScriptedChatModel final : public ChatModel {
public:
    ScriptedChatModel() = default;

    // JSON lines of {"prompt_hash": "...", "reply": "..."}. Throws DataError.
    static std::unique_ptr<ScriptedChatModel> load(const std::string& path);

    void add(std::string hash, std::string reply);
    void add(const Prompt& prompt, std::string reply);
    void set_fallback(std::string reply) { fallback_ = std::move(reply); }
    void set_strict(bool strict) { strict_ = strict; }

    std::string send(const std::string& system, const std::string& user) override;
    using ChatModel::send;

    std::size_t calls() const { return calls_.load(); }
    std::size_t misses() const { return misses_.load(); }
    std::size_t size() const { return replies_.size(); }

    // Replay-file form, sorted by hash.
    std::string to_jsonl() const;

private:
    std::unordered_map<std::string, std::string> replies_;
    std::string fallback_;
    bool strict_ = false;
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> misses_{0};
};

// Caps concurrent in-flight requests to the wrapped model.
class BoundedChatModel final : public ChatModel {
public:
    BoundedChatModel(ChatModel& inner, std::ptrdiff_t max_in_flight);

    std::string send(const std::string& system, const std::string& user) override;
    using ChatModel::send;

private:
    ChatModel& inner_;
    std::counting_semaphore<> slots_;
};

// Adapts a callable; handy for instrumented or failing test doubles.
class FunctionChatModel final : public ChatModel {
public:
    using Fn = std::function<std::string(const std::string&, const std::string&)>;
    explicit FunctionChatModel(Fn fn) : fn_(std::move(fn)) {}

    std::string send(const std::string& system, const std::string& user) override {
        return fn_(system, user);
    }
    using ChatModel::send;

private:
    Fn fn_;
};

// Scans `text` for embedded JSON objects/arrays (tolerating surrounding prose
// and code fences) and returns the first that parses and satisfies `accept`.
std::optional<nlohmann::json> find_json(std::string_view text,
                                        const std::function<bool(const nlohmann::json&)>& accept);

}  // namespace webkg
