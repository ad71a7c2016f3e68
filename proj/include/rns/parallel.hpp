#pragma once

// Trial fan-out over a small worker pool. Results land in per-trial slots and
// reductions run in trial-index order, so thread count never affects output.

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rns {

template <class R, class F>
std::vector<R> run_trials(std::size_t trials, unsigned threads, F&& fn) {
    std::vector<R> out(trials);
    if (threads <= 1) {
        for (std::size_t i = 0; i < trials; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned nthreads = std::min<std::size_t>(threads, trials);
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= trials) return;
                out[i] = fn(i);
            }
        });
    for (auto& th : pool) th.join();
    return out;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};

// two-pass mean / standard error over the given values, in index order
inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    r.count = xs.size();
    if (xs.empty()) return r;
    double acc = 0.0;
    for (double x : xs) acc += x;
    r.mean = acc / static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    r.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return r;
}

}  // namespace rns
