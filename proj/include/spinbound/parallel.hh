#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace spinbound
{
    /// 0 means "use std::thread::hardware_concurrency()".
    inline auto resolve_threads(unsigned requested) -> unsigned
    {
        if (requested != 0)
            return requested;
        return std::max(1u, std::thread::hardware_concurrency());
    }

    /// Evaluates fn(0..count-1) on up to `threads` workers. Results are
    /// indexed by task, never by completion order, so the output does not
    /// depend on the thread count. The lowest-index exception is rethrown.
    template <typename Fn>
    auto parallel_map(std::size_t count, unsigned threads, Fn && fn) -> std::vector<decltype(fn(std::size_t{}))>
    {
        using Result = decltype(fn(std::size_t{}));
        std::vector<std::optional<Result>> slots(count);
        std::vector<std::exception_ptr> errors(count);

        auto workers = std::min<std::size_t>(resolve_threads(threads), count);
        if (workers <= 1) {
            for (std::size_t i = 0 ; i < count ; ++i)
                slots[i].emplace(fn(i));
        }
        else {
            std::atomic<std::size_t> next{ 0 };
            auto work = [&] {
                for (std::size_t i = next++ ; i < count ; i = next++) {
                    try {
                        slots[i].emplace(fn(i));
                    }
                    catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            };
            std::vector<std::jthread> pool;
            for (std::size_t t = 0 ; t < workers ; ++t)
                pool.emplace_back(work);
            pool.clear();
            for (auto & e : errors)
                if (e)
                    std::rethrow_exception(e);
        }

        std::vector<Result> results;
        results.reserve(count);
        for (auto & s : slots)
            results.push_back(std::move(*s));
        return results;
    }
}
