#pragma once

// The probability law on symbol sequences: Bernoulli draws, a periodic word
// with uniformly random phase, or a single constant symbol. Sampling is
// deterministic in (master seed, trial index, position).

#include "rns/rng.hpp"
#include "rns/scalar.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rns {

enum class BaseKind : std::uint8_t { Bernoulli, Periodic, Singleton };

inline const char* to_string(BaseKind k) {
    switch (k) {
        case BaseKind::Bernoulli: return "bernoulli";
        case BaseKind::Periodic: return "periodic";
        case BaseKind::Singleton: return "singleton";
    }
    return "?";
}

class BaseProcess {
public:
    static BaseProcess bernoulli(std::vector<long long> symbols, std::vector<mpq_class> weights) {
        if (symbols.empty() || symbols.size() != weights.size())
            throw std::invalid_argument("bernoulli: symbol/weight count mismatch");
        mpq_class sum = 0;
        for (auto& w : weights) {
            if (w <= 0) throw std::invalid_argument("bernoulli: weights must be positive");
            sum += w;
        }
        if (sum != 1) throw std::invalid_argument("bernoulli: weights must sum to 1");
        BaseProcess bp;
        bp.kind_ = BaseKind::Bernoulli;
        bp.symbols_ = std::move(symbols);
        bp.weights_ = std::move(weights);
        // cumulative thresholds floor(c_i * 2^64); the final bucket catches the rest
        mpq_class c = 0;
        const mpz_class two64 = mpz_class(1) << 64;
        for (std::size_t i = 0; i + 1 < bp.weights_.size(); ++i) {
            c += bp.weights_[i];
            mpz_class t = (c.get_num() * two64) / c.get_den();
            bp.thresholds_.push_back(t.get_ui());
        }
        return bp;
    }

    static BaseProcess periodic(std::vector<long long> word) {
        if (word.empty()) throw std::invalid_argument("periodic: empty word");
        BaseProcess bp;
        bp.kind_ = BaseKind::Periodic;
        bp.symbols_ = std::move(word);
        return bp;
    }

    static BaseProcess singleton(long long symbol) {
        BaseProcess bp;
        bp.kind_ = BaseKind::Singleton;
        bp.symbols_ = {symbol};
        return bp;
    }

    BaseKind kind() const { return kind_; }
    const std::vector<long long>& symbols() const { return symbols_; }
    const std::vector<mpq_class>& weights() const { return weights_; }

    // incremental symbol source; n-prefix equals the first n draws
    class Stream {
    public:
        Stream(const BaseProcess& bp, std::uint64_t seed, StreamTag tag, std::uint64_t trial)
            : bp_(&bp),
              rng_(CounterRng::substream(seed, static_cast<std::uint64_t>(tag), trial)) {
            if (bp_->kind_ == BaseKind::Periodic)
                phase_ = rng_.next_below(bp_->symbols_.size());
        }

        long long next() {
            switch (bp_->kind_) {
                case BaseKind::Singleton: return bp_->symbols_[0];
                case BaseKind::Periodic: {
                    const std::size_t m = bp_->symbols_.size();
                    return bp_->symbols_[(phase_ + pos_++) % m];
                }
                case BaseKind::Bernoulli: {
                    const std::uint64_t u = rng_.next();
                    std::size_t i = 0;
                    while (i < bp_->thresholds_.size() && u >= bp_->thresholds_[i]) ++i;
                    ++pos_;
                    return bp_->symbols_[i];
                }
            }
            throw std::logic_error("Stream: bad kind");
        }

        std::uint64_t phase() const { return phase_; }

    private:
        const BaseProcess* bp_;
        CounterRng rng_;
        std::uint64_t phase_ = 0;
        std::uint64_t pos_ = 0;
    };

    Stream stream(std::uint64_t seed, StreamTag tag, std::uint64_t trial) const {
        return Stream(*this, seed, tag, trial);
    }

    std::vector<long long> sample_prefix(std::uint64_t seed, StreamTag tag, std::uint64_t trial,
                                         std::size_t n) const {
        Stream st = stream(seed, tag, trial);
        std::vector<long long> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(st.next());
        return out;
    }

    // h_nu: -sum p_i log p_i for Bernoulli, 0 for periodic/singleton orbits
    double base_entropy() const {
        if (kind_ != BaseKind::Bernoulli) return 0.0;
        double h = 0.0;
        for (auto& w : weights_) h -= w.get_d() * log_mpq(w);
        return h;
    }

private:
    BaseProcess() = default;

    BaseKind kind_ = BaseKind::Singleton;
    std::vector<long long> symbols_;
    std::vector<mpq_class> weights_;
    std::vector<std::uint64_t> thresholds_;
};

// Uniform decimal-grid rational x = k / 10^digits, deterministic in
// (seed, trial). 18 digits are extracted per 64-bit draw.
inline mpq_class sample_point(std::uint64_t seed, std::uint64_t trial, unsigned digits) {
    if (digits < 1) throw std::invalid_argument("sample_point: digits must be >= 1");
    CounterRng rng = CounterRng::substream(seed, static_cast<std::uint64_t>(StreamTag::Point), trial);
    constexpr std::uint64_t kChunkMod = 1000000000000000000ULL;  // 10^18
    mpz_class k = 0;
    unsigned remaining = digits;
    while (remaining > 0) {
        const unsigned take = remaining >= 18 ? 18 : remaining;
        std::uint64_t mod = 1;
        for (unsigned i = 0; i < take; ++i) mod *= 10;
        const std::uint64_t chunk =
            take == 18 ? rng.next_below(kChunkMod) : rng.next_below(mod);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, take);
        k = k * scale + static_cast<unsigned long>(chunk);
        remaining -= take;
    }
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, digits);
    mpq_class x(k, den);
    x.canonicalize();
    return x;
}

}  // namespace rns
