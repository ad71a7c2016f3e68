#pragma once

// Fiber entropy by three routes (cylinder decay, Birkhoff averages of the log
// derivative, joint-cylinder plug-in), closed forms where the system admits
// them, and the statistical harness for the zero-property and the central
// limit behaviour of cylinder measures and of the comparison series m(n).

#include "rns/base_process.hpp"
#include "rns/cylinder.hpp"
#include "rns/lochs.hpp"
#include "rns/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rns {

struct degenerate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EntropyMethod : std::uint8_t { Smb, Rokhlin, PluginAr, ClosedForm };

inline const char* to_string(EntropyMethod m) {
    switch (m) {
        case EntropyMethod::Smb: return "smb";
        case EntropyMethod::Rokhlin: return "rokhlin";
        case EntropyMethod::PluginAr: return "plugin_ar";
        case EntropyMethod::ClosedForm: return "closed_form";
    }
    return "?";
}

struct EntropyEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    EntropyMethod method = EntropyMethod::Smb;
    long n = 0;
    long trials = 0;
    long excluded = 0;
};

struct EstimatorParams {
    long n = 1000;
    long trials = 100;
    std::uint64_t seed = 1;
    unsigned precision_digits = 64;
    unsigned threads = 1;
};

namespace entropy_detail {

struct TrialValue {
    bool ok = false;
    double value = 0.0;
};

inline EntropyEstimate reduce(std::vector<TrialValue> results, EntropyMethod method,
                              const EstimatorParams& params) {
    std::vector<double> vals;
    vals.reserve(results.size());
    long excluded = 0;
    for (const auto& r : results) {
        if (r.ok)
            vals.push_back(r.value);
        else
            ++excluded;
    }
    if (vals.empty()) throw std::runtime_error("entropy estimate: all trials excluded");
    const MeanStderr ms = mean_stderr(vals);
    EntropyEstimate est;
    est.value = ms.mean;
    est.stderr_ = ms.stderr_;
    est.method = method;
    est.n = params.n;
    est.trials = params.trials;
    est.excluded = excluded;
    return est;
}

}  // namespace entropy_detail

// Monte Carlo mean of -log lambda(C_n)/n over sampled (omega, x).
template <class S>
EntropyEstimate smb_estimate(const FiberedMapFamily<S>& sys, const BaseProcess& base,
                             const EstimatorParams& params) {
    if (params.n < 1) throw std::invalid_argument("smb_estimate: n must be >= 1");
    auto one = [&](std::size_t trial) -> entropy_detail::TrialValue {
        try {
            auto stream = base.stream(params.seed, StreamTag::SymbolsT, trial);
            const S x = sys.ctx().make_mpq(sample_point(params.seed, trial, params.precision_digits));
            CylinderTracker<S> trk(sys, x);
            for (long k = 0; k < params.n; ++k) {
                trk.step(stream.next());
                if (trk.n() != k + 1) return {};
            }
            return {true, trk.neg_log_measure_rate()};
        } catch (const std::exception&) {
            return {};
        }
    };
    return entropy_detail::reduce(
        run_trials<entropy_detail::TrialValue>(static_cast<std::size_t>(params.trials),
                                               params.threads, one),
        EntropyMethod::Smb, params);
}

// Birkhoff average of log |DT| along the orbit; the random Rokhlin route.
template <class S>
EntropyEstimate rokhlin_estimate(const FiberedMapFamily<S>& sys, const BaseProcess& base,
                                 const EstimatorParams& params) {
    if (params.n < 1) throw std::invalid_argument("rokhlin_estimate: n must be >= 1");
    auto one = [&](std::size_t trial) -> entropy_detail::TrialValue {
        try {
            auto stream = base.stream(params.seed, StreamTag::SymbolsT, trial);
            S x = sys.ctx().make_mpq(sample_point(params.seed, trial, params.precision_digits));
            double acc = 0.0;
            for (long k = 0; k < params.n; ++k) {
                const long long sym = stream.next();
                acc += sys.log_deriv(sym, x);
                CellResult<S> cr;
                if (sys.cell_of(sym, x, cr) != CellStatus::Ok) return {};
                x = sys.apply_with_digit(sym, x, cr.digit);
                if (tri_less(x, sys.zero()) == Tri::True ||
                    tri_less_eq(sys.one(), x) == Tri::True)
                    return {};
            }
            return {true, acc / static_cast<double>(params.n)};
        } catch (const std::exception&) {
            return {};
        }
    };
    return entropy_detail::reduce(
        run_trials<entropy_detail::TrialValue>(static_cast<std::size_t>(params.trials),
                                               params.threads, one),
        EntropyMethod::Rokhlin, params);
}

// Joint-cylinder estimate of h(F) minus the base entropy, for families whose
// invariant measure is the product of the base law with Lebesgue measure.
template <class S>
EntropyEstimate plugin_ar_estimate(const FiberedMapFamily<S>& sys, const BaseProcess& base,
                                   const EstimatorParams& params) {
    const bool product_invariant =
        sys.kind() == SystemKind::IntegerBase || sys.kind() == SystemKind::Gls;
    if (!product_invariant)
        throw std::invalid_argument(
            "plugin_ar_estimate: supported only for integer-base and GLS families");
    if (base.kind() == BaseKind::Periodic)
        throw std::invalid_argument("plugin_ar_estimate: base must be Bernoulli or singleton");
    std::map<long long, double> log_p;
    if (base.kind() == BaseKind::Bernoulli) {
        for (std::size_t i = 0; i < base.symbols().size(); ++i)
            log_p[base.symbols()[i]] = log_mpq(base.weights()[i]);
    } else {
        log_p[base.symbols()[0]] = 0.0;
    }
    const double h_base = base.base_entropy();
    auto one = [&](std::size_t trial) -> entropy_detail::TrialValue {
        try {
            auto stream = base.stream(params.seed, StreamTag::SymbolsT, trial);
            const S x = sys.ctx().make_mpq(sample_point(params.seed, trial, params.precision_digits));
            CylinderTracker<S> trk(sys, x);
            double sum_log_p = 0.0;
            for (long k = 0; k < params.n; ++k) {
                const long long sym = stream.next();
                trk.step(sym);
                if (trk.n() != k + 1) return {};
                sum_log_p += log_p.at(sym);
            }
            const double joint = (-sum_log_p + trk.neg_log_measure()) /
                                 static_cast<double>(params.n);
            return {true, joint - h_base};
        } catch (const std::exception&) {
            return {};
        }
    };
    return entropy_detail::reduce(
        run_trials<entropy_detail::TrialValue>(static_cast<std::size_t>(params.trials),
                                               params.threads, one),
        EntropyMethod::PluginAr, params);
}

// Exact fiber entropy where one is known: weighted digit entropy for integer
// bases, cell entropy for GLS, log beta for beta-transformations, and the
// word average of log beta for alternate bases.
inline std::optional<double> closed_form_entropy(const SystemDescriptor& sys,
                                                 const BaseProcess& base) {
    switch (sys.kind) {
        case SystemKind::IntegerBase: {
            if (base.kind() == BaseKind::Bernoulli) {
                double h = 0.0;
                for (std::size_t i = 0; i < base.symbols().size(); ++i)
                    h += base.weights()[i].get_d() *
                         std::log(static_cast<double>(base.symbols()[i]));
                return h;
            }
            if (base.kind() == BaseKind::Singleton)
                return std::log(static_cast<double>(base.symbols()[0]));
            if (base.kind() == BaseKind::Periodic) {
                double h = 0.0;
                for (long long sym : base.symbols())
                    h += std::log(static_cast<double>(sym));
                return h / static_cast<double>(base.symbols().size());
            }
            return std::nullopt;
        }
        case SystemKind::Gls: {
            double h = 0.0;
            for (const auto& q : sys.gls_sizes) h -= q.get_d() * log_mpq(q);
            return h;
        }
        case SystemKind::Beta: return sys.betas[0].log_double();
        case SystemKind::BetaFamily: {
            // the base entropy is zero, so h is the word-average of log beta
            double h = 0.0;
            std::size_t count = 0;
            if (base.kind() == BaseKind::Periodic || base.kind() == BaseKind::Singleton) {
                for (long long sym : base.symbols()) {
                    h += sys.betas[static_cast<std::size_t>(sym)].log_double();
                    ++count;
                }
                return h / static_cast<double>(count);
            }
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

// sqrt of Var(log base) under Bernoulli weights; the CLT scale for random
// integer-base systems.
inline double sigma_integer_base(const SystemDescriptor& sys, const BaseProcess& base) {
    if (sys.kind != SystemKind::IntegerBase || base.kind() != BaseKind::Bernoulli)
        throw std::invalid_argument("sigma_integer_base: needs integer bases with Bernoulli draws");
    double mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < base.symbols().size(); ++i) {
        const double lg = std::log(static_cast<double>(base.symbols()[i]));
        const double p = base.weights()[i].get_d();
        mean += p * lg;
        second += p * lg * lg;
    }
    const double var = second - mean * mean;
    if (!(var > 1e-15)) throw degenerate_error("sigma_integer_base: zero variance");
    return std::sqrt(var);
}

// Diagnostic series (-log lambda(E_n(x)) - n h)/sqrt(n) for a deterministic
// system; identically zero for integer-base maps when h = log M.
template <class S>
std::vector<double> zero_property_series(const FiberedMapFamily<S>& sys, const S& x, long n_max,
                                         double h) {
    if (!sys.deterministic())
        throw std::invalid_argument("zero_property_series: system must be deterministic");
    const long long sym = sys.symbols()[0];
    CylinderTracker<S> trk(sys, x);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (long n = 1; n <= n_max; ++n) {
        trk.step(sym);
        if (trk.n() != n) break;  // finite expansion truncates the series
        const double numerator = trk.neg_log_measure() - static_cast<double>(n) * h;
        out.push_back(numerator / std::sqrt(static_cast<double>(n)));
    }
    return out;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Kolmogorov-Smirnov distance between the empirical law of the samples and
// the standard normal.
inline double ks_distance_to_normal(std::vector<double> z) {
    if (z.empty()) throw std::invalid_argument("ks_distance_to_normal: empty sample");
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double cdf = normal_cdf(z[i]);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    return d;
}

struct CltReport {
    std::vector<double> z;
    double ks = 1.0;
    double sigma = 0.0;
    double kappa = 0.0;        // comparison-series reports only
    double h_t = 0.0;
    double h_s = 0.0;          // comparison-series reports only
    bool h_from_closed_form = true;
    bool zero_property_assumed = false;  // set when S is a beta map
    bool degenerate = false;             // all samples equal
    double mean_ratio = 0.0;             // mean m(n)/n, comparison-series reports only
    long n = 0;
    long trials = 0;
    long excluded = 0;
    std::uint64_t seed = 0;
};

namespace entropy_detail {

// centering constant: closed form when available, else a long SMB run
template <class S>
std::pair<double, bool> centering_entropy(const FiberedMapFamily<S>& sys, const BaseProcess& base,
                                          const EstimatorParams& params) {
    if (const auto h = closed_form_entropy(sys.descriptor(), base)) return {*h, true};
    EstimatorParams hp = params;
    hp.n = params.n * 4;
    hp.trials = params.trials * 4;
    hp.precision_digits = params.precision_digits * 4;
    hp.seed = params.seed ^ 0x5eedc0de5eedc0deULL;
    return {smb_estimate(sys, base, hp).value, false};
}

inline void finish_clt_report(CltReport& rep, std::vector<TrialValue> results,
                              const EstimatorParams& params) {
    for (const auto& r : results) {
        if (r.ok)
            rep.z.push_back(r.value);
        else
            ++rep.excluded;
    }
    if (rep.z.empty()) throw std::runtime_error("clt check: all trials excluded");
    rep.ks = ks_distance_to_normal(rep.z);
    const auto [mn, mx] = std::minmax_element(rep.z.begin(), rep.z.end());
    rep.degenerate = (*mn == *mx);
    rep.n = params.n;
    rep.trials = params.trials;
    rep.seed = params.seed;
}

}  // namespace entropy_detail

// Samples (-log lambda(C_n) - n h)/(sigma sqrt n) and reports its KS distance
// to the standard normal.
template <class S>
CltReport clt_property_check(const FiberedMapFamily<S>& sys, const BaseProcess& base, double sigma,
                             const EstimatorParams& params) {
    if (!(sigma > 0)) throw degenerate_error("clt_property_check: sigma must be positive");
    CltReport rep;
    rep.sigma = sigma;
    const auto [h, closed] = entropy_detail::centering_entropy(sys, base, params);
    rep.h_t = h;
    rep.h_from_closed_form = closed;
    const double scale = sigma * std::sqrt(static_cast<double>(params.n));
    auto one = [&](std::size_t trial) -> entropy_detail::TrialValue {
        try {
            auto stream = base.stream(params.seed, StreamTag::SymbolsT, trial);
            const S x = sys.ctx().make_mpq(sample_point(params.seed, trial, params.precision_digits));
            CylinderTracker<S> trk(sys, x);
            for (long k = 0; k < params.n; ++k) {
                trk.step(stream.next());
                if (trk.n() != k + 1) return {};
            }
            const double num = trk.neg_log_measure() - static_cast<double>(params.n) * h;
            return {true, num / scale};
        } catch (const std::exception&) {
            return {};
        }
    };
    entropy_detail::finish_clt_report(
        rep,
        run_trials<entropy_detail::TrialValue>(static_cast<std::size_t>(params.trials),
                                               params.threads, one),
        params);
    return rep;
}

// Samples (m(n) - n h_T/h_S)/(kappa sqrt n) against a deterministic S with
// kappa = sigma/h_S, and reports its KS distance to the standard normal.
template <class S>
CltReport lochs_clt_check(const FiberedMapFamily<S>& sys_t, const BaseProcess& base_t,
                          const FiberedMapFamily<S>& sys_s, double sigma,
                          const EstimatorParams& params) {
    if (!(sigma > 0)) throw degenerate_error("lochs_clt_check: sigma must be positive");
    if (!sys_s.deterministic())
        throw std::invalid_argument("lochs_clt_check: S must be deterministic");
    const SystemKind sk = sys_s.kind();
    if (sk != SystemKind::IntegerBase && sk != SystemKind::Beta)
        throw std::invalid_argument(
            "lochs_clt_check: S must be an integer-base or beta map with the zero-property");
    CltReport rep;
    rep.sigma = sigma;
    rep.zero_property_assumed = sk == SystemKind::Beta;
    const BaseProcess base_s = BaseProcess::singleton(sys_s.symbols()[0]);
    const auto h_s = closed_form_entropy(sys_s.descriptor(), base_s);
    if (!h_s || !(*h_s > 0))
        throw std::invalid_argument("lochs_clt_check: S entropy unavailable");
    rep.h_s = *h_s;
    const auto [h_t, closed] = entropy_detail::centering_entropy(sys_t, base_t, params);
    rep.h_t = h_t;
    rep.h_from_closed_form = closed;
    rep.kappa = sigma / *h_s;
    const double slope = h_t / *h_s;
    const double scale = rep.kappa * std::sqrt(static_cast<double>(params.n));
    const long s_cap = lochs_default_cap(params.n, slope);
    const long long sym_s = sys_s.symbols()[0];

    auto one = [&](std::size_t trial) -> entropy_detail::TrialValue {
        try {
            const auto omega_t = base_t.sample_prefix(params.seed, StreamTag::SymbolsT, trial,
                                                      static_cast<std::size_t>(params.n));
            auto next_s = [sym_s]() { return sym_s; };
            const S x =
                sys_t.ctx().make_mpq(sample_point(params.seed, trial, params.precision_digits));
            const LochsSeries series =
                lochs_series(sys_t, omega_t, sys_s, next_s, x, params.n, s_cap);
            const double m_final = static_cast<double>(series.m.back());
            return {true, (m_final - static_cast<double>(params.n) * slope) / scale};
        } catch (const std::exception&) {
            return {};
        }
    };
    entropy_detail::finish_clt_report(
        rep,
        run_trials<entropy_detail::TrialValue>(static_cast<std::size_t>(params.trials),
                                               params.threads, one),
        params);
    double acc = 0.0;
    for (double zv : rep.z)
        acc += (zv * scale + static_cast<double>(params.n) * slope) / static_cast<double>(params.n);
    rep.mean_ratio = acc / static_cast<double>(rep.z.size());
    return rep;
}

}  // namespace rns
