#pragma once

#include <atomic>
#include <cstddef>

namespace webkg {

// Counters shared by one or more pipeline runs; safe to bump from workers.
struct Instrumentation {
    std::atomic<std::size_t> corpus_builds{0};
    std::atomic<std::size_t> index_builds{0};
    std::atomic<std::size_t> web_generations{0};
    std::atomic<std::size_t> kg_runs{0};
};

inline void bump(Instrumentation* instr, std::atomic<std::size_t> Instrumentation::*counter) {
    if (instr != nullptr) {
        (instr->*counter).fetch_add(1, std::memory_order_relaxed);
    }
}

}  // namespace webkg
