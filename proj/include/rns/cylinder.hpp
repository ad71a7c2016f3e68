#pragma once

// Incremental tracking of the random cylinder containing a point: the digit
// word, the composed inverse branch, the admissible image interval, and the
// cylinder itself with its Lebesgue measure.

#include "rns/base_process.hpp"
#include "rns/branch.hpp"
#include "rns/interval.hpp"
#include "rns/system.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace rns {

enum class TrackerStatus : std::uint8_t { Active, FiniteExpansion, Ambiguous };

inline const char* to_string(TrackerStatus s) {
    switch (s) {
        case TrackerStatus::Active: return "active";
        case TrackerStatus::FiniteExpansion: return "finite_expansion";
        case TrackerStatus::Ambiguous: return "ambiguous";
    }
    return "?";
}

constexpr long long kSentinelDigit = -1;

template <class S>
class CylinderTracker {
public:
    CylinderTracker(const FiberedMapFamily<S>& sys, S x)
        : sys_(&sys),
          x_(std::move(x)),
          phi_(InverseBranch<S>::identity(sys.ctx())),
          admissible_(sys.unit_half_open()) {
        if (tri_less(x_, sys.zero()) == Tri::True || tri_less_eq(sys.one(), x_) == Tri::True)
            throw std::domain_error("CylinderTracker: x outside [0,1)");
    }

    TrackerStatus status() const { return status_; }
    long n() const { return n_; }
    const S& point() const { return x_; }
    const std::vector<long long>& digits() const { return digits_; }
    const Interval<S>& admissible() const { return admissible_; }
    const InverseBranch<S>& composed() const { return phi_; }
    const FiberedMapFamily<S>& system() const { return *sys_; }

    void step(long long sym) {
        if (status_ != TrackerStatus::Active)
            throw std::logic_error("CylinderTracker: step on a non-active tracker");
        CellResult<S> cr;
        CellStatus cs;
        try {
            cs = sys_->cell_of(sym, x_, cr);
        } catch (const enclosure_error&) {
            status_ = TrackerStatus::Ambiguous;
            return;
        }
        if (cs == CellStatus::NoCell) {
            digits_.push_back(kSentinelDigit);
            status_ = TrackerStatus::FiniteExpansion;
            return;
        }
        if (cs == CellStatus::Ambiguous) {
            status_ = TrackerStatus::Ambiguous;
            return;
        }
        const Interval<S> k = intersect(cr.cell, admissible_);
        InverseBranch<S> br = sys_->inverse_branch(sym, cr.digit);
        Interval<S> j_next;
        S x_next{};
        try {
            j_next = br.forward_interval(k);
            x_next = sys_->apply_with_digit(sym, x_, cr.digit);
        } catch (const enclosure_error&) {
            status_ = TrackerStatus::Ambiguous;
            return;
        }
        phi_ = compose(phi_, br);
        admissible_ = std::move(j_next);
        x_ = std::move(x_next);
        digits_.push_back(cr.digit);
        ++n_;
        if (sys_->constant_slope()) ++slope_counts_[sys_->slope_bucket(sym, cr.digit)];
        cached_n_ = -1;
        // orbits leaving [0,1) or the pure-Gauss fixed point 0 end the expansion
        if (tri_less_eq(sys_->one(), x_) == Tri::True || tri_less(x_, sys_->zero()) == Tri::True)
            status_ = TrackerStatus::FiniteExpansion;
        else if (sys_->zero_is_terminal() && tri_equal(x_, sys_->zero()) == Tri::True)
            status_ = TrackerStatus::FiniteExpansion;
    }

    // C_n = Phi_n(J_n)
    const Interval<S>& cylinder() const {
        if (cached_n_ != n_) {
            cached_cyl_ = phi_.apply(admissible_);
            cached_n_ = n_;
        }
        return cached_cyl_;
    }

    S cylinder_measure() const { return cylinder().measure(); }

    // -log lambda(C_n). Constant-slope families use the exact decomposition
    // sum(count_b * log slope_b) - log lambda(J_n); Moebius families take the
    // log of the exact measure.
    double neg_log_measure() const {
        if (sys_->constant_slope()) {
            double acc = 0.0;
            for (const auto& [bucket, count] : slope_counts_)
                acc += static_cast<double>(count) * sys_->log_slope(bucket);
            return acc - measure_log(admissible_.measure());
        }
        return -measure_log(cylinder_measure());
    }

    double neg_log_measure_rate() const {
        if (n_ < 1) throw std::logic_error("neg_log_measure_rate: n must be >= 1");
        if (sys_->constant_slope()) {
            double acc = 0.0;
            for (const auto& [bucket, count] : slope_counts_)
                acc += (static_cast<double>(count) / static_cast<double>(n_)) *
                       sys_->log_slope(bucket);
            return acc - measure_log(admissible_.measure()) / static_cast<double>(n_);
        }
        return -measure_log(cylinder_measure()) / static_cast<double>(n_);
    }

    const std::map<long long, long long>& slope_counts() const { return slope_counts_; }

private:
    static double measure_log(const S& m) {
        if constexpr (S::exact) {
            if (!m.is_positive()) throw std::domain_error("degenerate cylinder measure");
        }
        return m.log_value();
    }

    const FiberedMapFamily<S>* sys_;
    S x_;
    InverseBranch<S> phi_;
    Interval<S> admissible_;
    std::vector<long long> digits_;
    std::map<long long, long long> slope_counts_;
    TrackerStatus status_ = TrackerStatus::Active;
    long n_ = 0;
    mutable long cached_n_ = -1;
    mutable Interval<S> cached_cyl_;
};

}  // namespace rns
