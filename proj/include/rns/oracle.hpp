#pragma once

// Brute-force ground truth at small depth. Cylinders are enumerated by
// level-by-level pullback of interval endpoints through per-branch closed-form
// inverses written out here directly, independent of the composed-branch
// machinery in cylinder.hpp, so agreement between the two paths is meaningful.

#include "rns/interval.hpp"
#include "rns/system.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace rns {

template <class S>
struct CylinderRow {
    std::vector<long long> word;
    Interval<S> interval;
};

template <class S>
struct CylinderTable {
    long level = 0;
    std::vector<long long> omega;
    std::vector<CylinderRow<S>> rows;
};

struct oracle_guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace oracle_detail {

// {x in cell A_{sym,j} : T_sym(x) in target}, via the closed-form branch inverse
template <class S>
Interval<S> preimage_in_cell(const FiberedMapFamily<S>& sys, long long sym, long long j,
                             const Interval<S>& cell, const Interval<S>& target) {
    if (target.is_empty || cell.is_empty) return Interval<S>::empty();
    const auto& ctx = sys.ctx();
    bool increasing = true;
    auto inv = [&](const S& y) -> S {
        switch (sys.kind()) {
            case SystemKind::IntegerBase:
                return (y + ctx.make_long(static_cast<long>(j))) /
                       ctx.make_long(static_cast<long>(sym));
            case SystemKind::Gls: {
                const auto k = static_cast<std::size_t>(j);
                if (sys.gls_orientation(k) > 0) return sys.gls_cum(k) + sys.gls_size(k) * y;
                return sys.gls_cum(k + 1) - sys.gls_size(k) * y;
            }
            case SystemKind::Beta:
            case SystemKind::BetaFamily:
                return (y + ctx.make_long(static_cast<long>(j))) / sys.beta_of(sym);
            case SystemKind::Gauss:
                return ctx.make_long(1) / (y + ctx.make_long(static_cast<long>(j) + 1));
            case SystemKind::Renyi:
                return ctx.make_long(1) -
                       ctx.make_long(1) / (y + ctx.make_long(static_cast<long>(j) + 1));
            case SystemKind::GaussRenyi:
                if (sym == 0)
                    return ctx.make_long(1) / (y + ctx.make_long(static_cast<long>(j) + 1));
                return ctx.make_long(1) -
                       ctx.make_long(1) / (y + ctx.make_long(static_cast<long>(j) + 1));
        }
        throw std::logic_error("preimage_in_cell: bad kind");
    };
    switch (sys.kind()) {
        case SystemKind::Gauss: increasing = false; break;
        case SystemKind::GaussRenyi: increasing = sym != 0; break;
        case SystemKind::Gls: increasing = sys.gls_orientation(static_cast<std::size_t>(j)) > 0; break;
        default: increasing = true; break;
    }
    Interval<S> raw = increasing
                          ? Interval<S>(inv(target.lo), inv(target.hi), target.lo_open,
                                        target.hi_open)
                          : Interval<S>(inv(target.hi), inv(target.lo), target.hi_open,
                                        target.lo_open);
    return intersect(raw, cell);
}

template <class S>
bool certainly_nonempty(const Interval<S>& iv) {
    if (iv.is_empty) return false;
    if constexpr (S::exact) return true;  // intersect() already pruned exact empties
    return tri_less(iv.lo, iv.hi) == Tri::True;
}

}  // namespace oracle_detail

// All admissible digit words of the given level, with their exact cylinders,
// in lexicographic word order. Countable partitions are truncated at cell
// index `cap`; inadmissible words prune to empty intersections.
template <class S>
CylinderTable<S> enumerate_cylinders(const FiberedMapFamily<S>& sys,
                                     std::span<const long long> omega, long level,
                                     long long cap = 64, std::size_t guard = 10000000) {
    if (level < 0 || static_cast<std::size_t>(level) > omega.size())
        throw std::invalid_argument("enumerate_cylinders: prefix shorter than level");
    CylinderTable<S> table;
    table.level = level;
    table.omega.assign(omega.begin(), omega.begin() + level);

    std::vector<CylinderRow<S>> rows;
    if (level == 0) {
        rows.push_back({{}, sys.unit_half_open()});
    } else {
        // the innermost level is the plain digit partition
        const long long last = omega[static_cast<std::size_t>(level - 1)];
        for (const auto& [j, cell] : sys.cells(last, cap).cells) rows.push_back({{j}, cell});
    }
    for (long depth = level - 2; depth >= 0; --depth) {
        const long long sym = omega[static_cast<std::size_t>(depth)];
        const auto cells = sys.cells(sym, cap);
        if (rows.size() * cells.cells.size() > guard)
            throw oracle_guard_error("enumerate_cylinders: combinatorial guard exceeded");
        std::vector<CylinderRow<S>> next;
        next.reserve(rows.size() * cells.cells.size());
        for (const auto& [j, cell] : cells.cells) {
            for (const auto& row : rows) {
                Interval<S> pre = oracle_detail::preimage_in_cell(sys, sym, j, cell, row.interval);
                if (!oracle_detail::certainly_nonempty(pre)) continue;
                CylinderRow<S> r;
                r.word.reserve(row.word.size() + 1);
                r.word.push_back(j);
                r.word.insert(r.word.end(), row.word.begin(), row.word.end());
                r.interval = std::move(pre);
                next.push_back(std::move(r));
            }
        }
        rows = std::move(next);
    }
    // lexicographic order by digit word
    std::sort(rows.begin(), rows.end(),
              [](const CylinderRow<S>& a, const CylinderRow<S>& b) { return a.word < b.word; });
    table.rows = std::move(rows);
    return table;
}

template <class S>
struct PartitionReport {
    bool disjoint = true;
    std::size_t overlap_count = 0;
    S total;            // sum of row measures
    S residual;         // 1 - total
    bool total_is_one = false;
};

// Verifies pairwise disjointness (honoring openness) and sums the masses.
template <class S>
PartitionReport<S> check_partition(const FiberedMapFamily<S>& sys, const CylinderTable<S>& table) {
    PartitionReport<S> rep;
    const auto& ctx = sys.ctx();
    rep.total = ctx.make_long(0);
    std::vector<const CylinderRow<S>*> sorted;
    sorted.reserve(table.rows.size());
    for (const auto& r : table.rows) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const CylinderRow<S>* a, const CylinderRow<S>* b) {
        return a->interval.lo.to_double() < b->interval.lo.to_double();
    });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        rep.total = rep.total + sorted[i]->interval.measure();
        if (i + 1 < sorted.size()) {
            const auto& a = sorted[i]->interval;
            const auto& b = sorted[i + 1]->interval;
            const Tri strictly_below = tri_less(a.hi, b.lo);
            bool ok;
            if (strictly_below == Tri::True) {
                ok = true;
            } else if (tri_equal(a.hi, b.lo) == Tri::True) {
                ok = a.hi_open || b.lo_open;
            } else {
                ok = false;
            }
            if (!ok) {
                rep.disjoint = false;
                ++rep.overlap_count;
            }
        }
    }
    rep.residual = ctx.make_long(1) - rep.total;
    rep.total_is_one = tri_equal(rep.total, ctx.make_long(1)) == Tri::True;
    return rep;
}

// Largest m <= m_cap with E_m(x) containing the given T-cylinder of x,
// where E_m(x) is recomputed from scratch each level by endpoint pullback.
template <class S>
long brute_force_m(const CylinderTable<S>& table_t, const FiberedMapFamily<S>& sys_s,
                   std::span<const long long> omega_s, const S& x, long m_cap) {
    const CylinderRow<S>* row = nullptr;
    for (const auto& r : table_t.rows)
        if (contains_point(r.interval, x) == Tri::True) {
            row = &r;
            break;
        }
    if (row == nullptr) throw std::invalid_argument("brute_force_m: x has no cylinder in table");

    std::vector<long long> digits;
    S y = x;
    for (long m = 1; m <= m_cap; ++m) {
        if (static_cast<std::size_t>(m) > omega_s.size())
            throw std::invalid_argument("brute_force_m: S prefix exhausted");
        const long long sym = omega_s[static_cast<std::size_t>(m - 1)];
        CellResult<S> cr;
        if (sys_s.cell_of(sym, y, cr) != CellStatus::Ok)
            throw std::domain_error("brute_force_m: digit undefined along the S expansion");
        digits.push_back(cr.digit);
        y = sys_s.apply_with_digit(sym, y, cr.digit);
        // E_m by backward endpoint pullback over the digit word; the innermost
        // level is the plain digit cell
        auto cell_of_level = [&](long k) -> Interval<S> {
            const long long sk = omega_s[static_cast<std::size_t>(k - 1)];
            const long long dk = digits[static_cast<std::size_t>(k - 1)];
            for (const auto& [j, c] : sys_s.cells(sk, dk + 1).cells)
                if (j == dk) return c;
            throw std::logic_error("brute_force_m: missing cell");
        };
        Interval<S> e = cell_of_level(m);
        for (long k = m - 1; k >= 1; --k)
            e = oracle_detail::preimage_in_cell(sys_s, omega_s[static_cast<std::size_t>(k - 1)],
                                                digits[static_cast<std::size_t>(k - 1)],
                                                cell_of_level(k), e);
        if (contains(e, row->interval) != Tri::True) return m - 1;
    }
    throw std::runtime_error("brute_force_m: containment still holds at m_cap");
}

}  // namespace rns
