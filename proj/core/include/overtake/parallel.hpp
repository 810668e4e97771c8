#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace overtake
{

/// Number of workers to use when the caller passes 0.
inline std::size_t default_thread_count ()
{
    return std::max<std::size_t> (1, std::thread::hardware_concurrency ());
}

/**
 * Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware count).
 *
 * Work is handed out by an atomic counter, so the assignment of indices to
 * threads varies; results must be written to per-index slots. The first
 * exception thrown by any body is rethrown after all workers join.
 */
template <class Body> void parallel_for (std::size_t n, std::size_t threads, Body &&body)
{
    if (threads == 0)
        threads = default_thread_count ();
    threads = std::min (threads, n);
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body (i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve (threads);
        for (std::size_t w = 0; w < threads; ++w)
            workers.emplace_back ([&] {
                for (std::size_t i = next.fetch_add (1); i < n; i = next.fetch_add (1))
                {
                    try
                    {
                        body (i);
                    }
                    catch (...)
                    {
                        const std::lock_guard lock (error_mutex);
                        if (!error)
                            error = std::current_exception ();
                    }
                }
            });
    }
    if (error)
        std::rethrow_exception (error);
}

} // namespace overtake
