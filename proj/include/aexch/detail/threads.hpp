#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>

namespace aexch::detail {

/// Worker count for replica/node parallelism: hardware concurrency capped by
/// the AEXCH_THREADS environment variable and by the amount of work.
inline std::size_t worker_count(std::size_t work_items,
                                std::size_t requested = 0) {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (requested > 0) n = std::min(n, requested);
    if (const char* env = std::getenv("AEXCH_THREADS")) {
        const long cap = std::atol(env);
        if (cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, std::max<std::size_t>(work_items, 1)));
}

} // namespace aexch::detail
