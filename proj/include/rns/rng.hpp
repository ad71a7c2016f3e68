#pragma once

// Counter-based pseudo-random generator built on the splitmix64 finalizer.
// Every output is a pure function of (master seed, stream tag, trial index,
// position), so parallel trial schedules reproduce bit-identical streams.

#include <cstdint>

namespace rns {

inline std::uint64_t splitmix64_fin(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class CounterRng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    // substream keyed by (master seed, tag, trial)
    static CounterRng substream(std::uint64_t master, std::uint64_t tag, std::uint64_t trial) {
        std::uint64_t k = splitmix64_fin(master + kGamma);
        k = splitmix64_fin(k ^ (tag + 0xD1B54A32D192ED03ULL));
        k = splitmix64_fin(k ^ (trial * kGamma + 0x8BB84B93962EACC9ULL));
        return CounterRng(k);
    }

    std::uint64_t next() { return splitmix64_fin(key_ + (++counter_) * kGamma); }

    // exact uniform draw from {0,...,m-1} by rejection
    std::uint64_t next_below(std::uint64_t m) {
        const std::uint64_t limit = m * (~0ULL / m);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % m;
    }

private:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// fixed stream tags so that per-trial draws of symbols and points are independent
enum class StreamTag : std::uint64_t {
    SymbolsT = 1,
    SymbolsS = 2,
    Point = 3,
};

}  // namespace rns
