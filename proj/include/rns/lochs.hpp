#pragma once

// The comparison series m(n): the deepest S-cylinder level still containing
// the level-n T-cylinder of the same point, computed by a two-pointer sweep
// with the S expansion advanced lazily.

#include "rns/base_process.hpp"
#include "rns/cylinder.hpp"
#include "rns/parallel.hpp"

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rns {

struct lochs_prefix_error : std::runtime_error {
    explicit lochs_prefix_error(std::size_t needed_)
        : std::runtime_error("lochs: S prefix exhausted, need at least " +
                             std::to_string(needed_) + " symbols"),
          needed(needed_) {}
    std::size_t needed;
};

struct lochs_unknown_error : std::runtime_error {
    lochs_unknown_error() : std::runtime_error("lochs: containment undecidable on this backend") {}
};

// a tracker left the ACTIVE state before the sweep finished
struct lochs_trial_error : std::runtime_error {
    lochs_trial_error(const char* which_, TrackerStatus status_)
        : std::runtime_error(std::string("lochs: ") + which_ + " tracker became " +
                             to_string(status_)),
          which(which_),
          status(status_) {}
    const char* which;
    TrackerStatus status;
};

struct LochsSeries {
    long n_max = 0;
    std::vector<long> m;                // m[i] is m(i+1)
    std::vector<double> neg_log_t;      // -log lambda(C^T_n), n = 1..n_max
    std::vector<double> neg_log_s;      // -log lambda(C^S_k), k = 1..deepest level
    std::vector<long long> digits_t;
    std::vector<long long> digits_s;
};

// Core sweep. T symbols come from a prefix; S symbols are pulled on demand
// from `next_s`, at most `s_cap` of them.
template <class S>
LochsSeries lochs_series(const FiberedMapFamily<S>& sys_t, std::span<const long long> omega_t,
                         const FiberedMapFamily<S>& sys_s,
                         const std::function<long long()>& next_s, const S& x, long n_max,
                         long s_cap) {
    if (n_max < 1) throw std::invalid_argument("lochs_series: n_max must be >= 1");
    if (static_cast<std::size_t>(n_max) > omega_t.size())
        throw std::invalid_argument("lochs_series: T prefix shorter than n_max");

    CylinderTracker<S> trk_t(sys_t, x);
    CylinderTracker<S> trk_s(sys_s, x);

    LochsSeries out;
    out.n_max = n_max;
    out.m.reserve(static_cast<std::size_t>(n_max));
    out.neg_log_t.reserve(static_cast<std::size_t>(n_max));

    long m_cur = 0;
    Interval<S> cs_cache = trk_s.cylinder();

    for (long n = 1; n <= n_max; ++n) {
        trk_t.step(omega_t[static_cast<std::size_t>(n - 1)]);
        if (trk_t.n() != n) throw lochs_trial_error("T", trk_t.status());
        const Interval<S>& ct = trk_t.cylinder();
        for (;;) {
            if (trk_s.n() == m_cur) {
                if (trk_s.status() != TrackerStatus::Active)
                    throw lochs_trial_error("S", trk_s.status());
                if (m_cur >= s_cap) throw lochs_prefix_error(static_cast<std::size_t>(s_cap) + 1);
                trk_s.step(next_s());
                if (trk_s.n() == m_cur) throw lochs_trial_error("S", trk_s.status());
                cs_cache = trk_s.cylinder();
                out.neg_log_s.push_back(trk_s.neg_log_measure());
            }
            const Tri c = contains(cs_cache, ct);
            if (c == Tri::Unknown) throw lochs_unknown_error();
            if (c == Tri::True)
                m_cur = trk_s.n();
            else
                break;
        }
        out.m.push_back(m_cur);
        out.neg_log_t.push_back(trk_t.neg_log_measure());
        if (trk_t.status() != TrackerStatus::Active && n < n_max)
            throw lochs_trial_error("T", trk_t.status());
    }
    out.digits_t = trk_t.digits();
    out.digits_s = trk_s.digits();
    return out;
}

// Prefix-based form: errors carry the prefix length that would be needed.
template <class S>
LochsSeries lochs_series(const FiberedMapFamily<S>& sys_t, std::span<const long long> omega_t,
                         const FiberedMapFamily<S>& sys_s, std::span<const long long> omega_s,
                         const S& x, long n_max) {
    std::size_t pos = 0;
    auto next = [&]() -> long long {
        if (pos >= omega_s.size()) throw lochs_prefix_error(pos + 1);
        return omega_s[pos++];
    };
    return lochs_series(sys_t, omega_t, sys_s, next, x, n_max,
                        static_cast<long>(omega_s.size()));
}

enum class TrialStatus : std::uint8_t {
    Included,
    ExcludedFinite,
    ExcludedAmbiguous,
    ExcludedError,
};

struct LochsTrial {
    TrialStatus status = TrialStatus::ExcludedError;
    double ratio = 0.0;  // m(n)/n
    long m_final = 0;
    std::string error;
    LochsSeries series;  // populated only when keep_series is set
};

struct LochsExperimentParams {
    long n = 1000;
    long trials = 100;
    std::uint64_t seed = 1;
    unsigned precision_digits = 64;
    long s_cap = 0;           // 0: use 4*n*ratio_hint + 64
    double ratio_hint = 1.0;  // rough h_T/h_S when known
    unsigned threads = 1;
    bool keep_series = false;
};

struct LochsExperimentResult {
    MeanStderr ratio;
    long included = 0;
    long excluded_finite = 0;
    long excluded_ambiguous = 0;
    long excluded_error = 0;
    std::vector<LochsTrial> trials;
};

inline long lochs_default_cap(long n, double ratio_hint) {
    const double cap = 4.0 * static_cast<double>(n) * std::max(1.0, ratio_hint) + 64.0;
    return static_cast<long>(cap);
}

// Monte Carlo over independently sampled (omega, omega-tilde, x).
template <class S>
LochsExperimentResult lochs_ratio_experiment(const FiberedMapFamily<S>& sys_t,
                                             const BaseProcess& base_t,
                                             const FiberedMapFamily<S>& sys_s,
                                             const BaseProcess& base_s,
                                             const LochsExperimentParams& params) {
    if (params.trials < 1) throw std::invalid_argument("lochs experiment: trials must be >= 1");
    const long s_cap =
        params.s_cap > 0 ? params.s_cap : lochs_default_cap(params.n, params.ratio_hint);

    auto one_trial = [&](std::size_t trial) -> LochsTrial {
        LochsTrial out;
        try {
            const auto omega_t = base_t.sample_prefix(params.seed, StreamTag::SymbolsT, trial,
                                                      static_cast<std::size_t>(params.n));
            auto stream_s = base_s.stream(params.seed, StreamTag::SymbolsS, trial);
            auto next_s = [&stream_s]() { return stream_s.next(); };
            const mpq_class xq = sample_point(params.seed, trial, params.precision_digits);
            scalar_ctx<S> ctx = sys_t.ctx();
            const S x = ctx.make_mpq(xq);
            LochsSeries series =
                lochs_series(sys_t, omega_t, sys_s, next_s, x, params.n, s_cap);
            out.status = TrialStatus::Included;
            out.m_final = series.m.back();
            out.ratio = static_cast<double>(out.m_final) / static_cast<double>(params.n);
            if (params.keep_series) out.series = std::move(series);
        } catch (const lochs_trial_error& e) {
            out.status = e.status == TrackerStatus::FiniteExpansion ? TrialStatus::ExcludedFinite
                                                                    : TrialStatus::ExcludedAmbiguous;
            out.error = e.what();
        } catch (const lochs_unknown_error& e) {
            out.status = TrialStatus::ExcludedAmbiguous;
            out.error = e.what();
        } catch (const std::exception& e) {
            out.status = TrialStatus::ExcludedError;
            out.error = e.what();
        }
        return out;
    };

    LochsExperimentResult res;
    res.trials = run_trials<LochsTrial>(static_cast<std::size_t>(params.trials), params.threads,
                                        one_trial);
    std::vector<double> ratios;
    ratios.reserve(res.trials.size());
    for (const auto& t : res.trials) {
        switch (t.status) {
            case TrialStatus::Included:
                ratios.push_back(t.ratio);
                ++res.included;
                break;
            case TrialStatus::ExcludedFinite: ++res.excluded_finite; break;
            case TrialStatus::ExcludedAmbiguous: ++res.excluded_ambiguous; break;
            case TrialStatus::ExcludedError: ++res.excluded_error; break;
        }
    }
    if (res.included == 0) throw std::runtime_error("lochs experiment: all trials excluded");
    res.ratio = mean_stderr(ratios);
    return res;
}

}  // namespace rns
