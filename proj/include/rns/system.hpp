#pragma once

// Families {T_i} of piecewise monotone interval maps with their digit
// partitions: integer bases ix mod 1, GLS maps, beta-transformations,
// the Gauss map 1/x mod 1 and its reflected Renyi counterpart.

#include "rns/branch.hpp"
#include "rns/interval.hpp"
#include "rns/scalar.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rns {

enum class SystemKind : std::uint8_t {
    IntegerBase,
    Gls,
    Beta,
    Gauss,
    Renyi,
    GaussRenyi,
    BetaFamily,
};

inline const char* to_string(SystemKind k) {
    switch (k) {
        case SystemKind::IntegerBase: return "integer_base";
        case SystemKind::Gls: return "gls";
        case SystemKind::Beta: return "beta";
        case SystemKind::Gauss: return "gauss";
        case SystemKind::Renyi: return "renyi";
        case SystemKind::GaussRenyi: return "gauss_renyi";
        case SystemKind::BetaFamily: return "beta_family";
    }
    return "?";
}

// A beta value: exact rational, the exact value of a double, or the golden
// ratio (which needs an enclosure backend).
struct BetaSpec {
    enum class Kind : std::uint8_t { Exact, Double, GoldenRatio } kind = Kind::Exact;
    mpq_class exact = 2;
    double approx = 2.0;

    static BetaSpec exact_value(mpq_class q) {
        BetaSpec b;
        b.kind = Kind::Exact;
        b.exact = std::move(q);
        return b;
    }
    static BetaSpec double_value(double d) {
        BetaSpec b;
        b.kind = Kind::Double;
        b.approx = d;
        return b;
    }
    static BetaSpec golden_ratio() {
        BetaSpec b;
        b.kind = Kind::GoldenRatio;
        return b;
    }

    bool is_exact() const { return kind == Kind::Exact; }

    double log_double() const {
        switch (kind) {
            case Kind::Exact: return log_mpq(exact);
            case Kind::Double: return std::log(approx);
            case Kind::GoldenRatio: return std::log((1.0 + std::sqrt(5.0)) / 2.0);
        }
        return 0.0;
    }
};

struct SystemDescriptor {
    SystemKind kind = SystemKind::IntegerBase;
    std::vector<long> bases;              // IntegerBase
    std::vector<mpq_class> gls_sizes;     // Gls
    std::vector<int> gls_orientations;    // Gls, entries +1 / -1
    std::vector<BetaSpec> betas;          // Beta (one entry) or BetaFamily word

    static SystemDescriptor integer_base(std::vector<long> bases) {
        if (bases.empty()) throw std::invalid_argument("integer_base: empty base list");
        long prev = 1;
        for (long b : bases) {
            if (b < 2) throw std::invalid_argument("integer_base: bases must be >= 2");
            if (b <= prev) throw std::invalid_argument("integer_base: bases must strictly increase");
            prev = b;
        }
        SystemDescriptor d;
        d.kind = SystemKind::IntegerBase;
        d.bases = std::move(bases);
        return d;
    }

    static SystemDescriptor gls(std::vector<mpq_class> sizes, std::vector<int> orientations = {}) {
        if (sizes.empty()) throw std::invalid_argument("gls: empty size vector");
        mpq_class sum = 0;
        for (auto& q : sizes) {
            if (q <= 0 || q >= 1) throw std::invalid_argument("gls: sizes must lie in (0,1)");
            sum += q;
        }
        if (sum != 1) throw std::invalid_argument("gls: sizes must sum to 1");
        if (orientations.empty()) orientations.assign(sizes.size(), +1);
        if (orientations.size() != sizes.size())
            throw std::invalid_argument("gls: orientation count mismatch");
        for (int o : orientations)
            if (o != 1 && o != -1) throw std::invalid_argument("gls: orientations must be +1/-1");
        SystemDescriptor d;
        d.kind = SystemKind::Gls;
        d.gls_sizes = std::move(sizes);
        d.gls_orientations = std::move(orientations);
        return d;
    }

    static SystemDescriptor beta(BetaSpec b) {
        check_beta(b);
        SystemDescriptor d;
        d.kind = SystemKind::Beta;
        d.betas = {std::move(b)};
        return d;
    }

    static SystemDescriptor gauss() {
        SystemDescriptor d;
        d.kind = SystemKind::Gauss;
        return d;
    }
    static SystemDescriptor renyi() {
        SystemDescriptor d;
        d.kind = SystemKind::Renyi;
        return d;
    }
    static SystemDescriptor gauss_renyi() {
        SystemDescriptor d;
        d.kind = SystemKind::GaussRenyi;
        return d;
    }

    static SystemDescriptor beta_family(std::vector<BetaSpec> word) {
        if (word.empty()) throw std::invalid_argument("beta_family: empty word");
        for (auto& b : word) check_beta(b);
        SystemDescriptor d;
        d.kind = SystemKind::BetaFamily;
        d.betas = std::move(word);
        return d;
    }

    // symbol values accepted by the family
    std::vector<long long> symbols() const {
        switch (kind) {
            case SystemKind::IntegerBase: {
                std::vector<long long> s(bases.begin(), bases.end());
                return s;
            }
            case SystemKind::GaussRenyi: return {0, 1};
            case SystemKind::BetaFamily: {
                std::vector<long long> s;
                for (std::size_t i = 0; i < betas.size(); ++i) s.push_back(static_cast<long long>(i));
                return s;
            }
            default: return {0};
        }
    }

    bool deterministic() const { return symbols().size() == 1; }

private:
    static void check_beta(const BetaSpec& b) {
        if (b.kind == BetaSpec::Kind::Exact && b.exact <= 1)
            throw std::invalid_argument("beta: requires beta > 1");
        if (b.kind == BetaSpec::Kind::Double && !(b.approx > 1.0))
            throw std::invalid_argument("beta: requires beta > 1");
    }
};

enum class CellStatus : std::uint8_t {
    Ok,
    Ambiguous,  // enclosure straddles a cell boundary
    NoCell,     // the Gauss sentinel point x = 0
};

template <class S>
struct CellResult {
    long long digit = 0;
    Interval<S> cell;
};

template <class S>
S beta_scalar(const BetaSpec& b, const scalar_ctx<S>& ctx) {
    switch (b.kind) {
        case BetaSpec::Kind::Exact: return ctx.make_mpq(b.exact);
        case BetaSpec::Kind::Double: return ctx.make_mpq(mpq_class(b.approx));
        case BetaSpec::Kind::GoldenRatio: break;
    }
    if constexpr (std::is_same_v<S, Enclosure>) {
        return (Enclosure(1.0) + Enclosure::sqrt_ui(5)) / Enclosure(2.0);
    } else if constexpr (std::is_same_v<S, BigEnclosure>) {
        scalar_ctx<BigEnclosure> c{};
        c.prec = ctx.prec;
        return (c.make_long(1) + BigEnclosure::sqrt_ui_p(5, c.prec)) / c.make_long(2);
    } else {
        throw std::domain_error("beta: irrational beta requires an enclosure backend");
    }
}

template <class S>
class FiberedMapFamily {
public:
    explicit FiberedMapFamily(SystemDescriptor desc, scalar_ctx<S> ctx = {})
        : desc_(std::move(desc)), ctx_(ctx) {
        zero_ = ctx_.make_long(0);
        one_ = ctx_.make_long(1);
        switch (desc_.kind) {
            case SystemKind::Gls: {
                mpq_class c = 0;
                gls_cum_exact_.push_back(c);
                for (auto& q : desc_.gls_sizes) {
                    gls_sizes_.push_back(ctx_.make_mpq(q));
                    c += q;
                    gls_cum_exact_.push_back(c);
                }
                for (auto& cq : gls_cum_exact_) gls_cum_.push_back(ctx_.make_mpq(cq));
                break;
            }
            case SystemKind::Beta:
            case SystemKind::BetaFamily: {
                for (auto& b : desc_.betas) {
                    S bv = beta_scalar<S>(b, ctx_);
                    const long c = ceil_of(bv);
                    betas_.push_back(std::move(bv));
                    beta_ceils_.push_back(c);
                }
                break;
            }
            default: break;
        }
    }

    const SystemDescriptor& descriptor() const { return desc_; }
    SystemKind kind() const { return desc_.kind; }
    const scalar_ctx<S>& ctx() const { return ctx_; }
    std::vector<long long> symbols() const { return desc_.symbols(); }
    bool deterministic() const { return desc_.deterministic(); }

    // digit j with x ∈ A_{i,j}, plus the cell itself
    CellStatus cell_of(long long sym, const S& x, CellResult<S>& out) const {
        check_point(x);
        switch (desc_.kind) {
            case SystemKind::IntegerBase: return cell_integer_base(base_of(sym), x, out);
            case SystemKind::Gls: return cell_gls(x, out);
            case SystemKind::Beta: return cell_beta(0, x, out);
            case SystemKind::BetaFamily: return cell_beta(beta_index(sym), x, out);
            case SystemKind::Gauss: return cell_gauss(x, out);
            case SystemKind::Renyi: return cell_renyi(x, out);
            case SystemKind::GaussRenyi:
                return sym == 0 ? cell_gauss(x, out) : cell_renyi(x, out);
        }
        throw std::logic_error("cell_of: bad kind");
    }

    // T_i(x); throws domain_error at the Gauss sentinel, enclosure_error on ambiguity
    S apply(long long sym, const S& x) const {
        CellResult<S> cr;
        const CellStatus st = cell_of(sym, x, cr);
        if (st == CellStatus::NoCell) throw std::domain_error("apply: no digit at this point");
        if (st == CellStatus::Ambiguous) throw enclosure_error("apply: ambiguous cell");
        return apply_with_digit(sym, x, cr.digit);
    }

    S apply_with_digit(long long sym, const S& x, long long j) const {
        switch (desc_.kind) {
            case SystemKind::IntegerBase:
                return ctx_.make_long(base_of(sym)) * x - ctx_.make_long(static_cast<long>(j));
            case SystemKind::Gls: {
                const std::size_t k = static_cast<std::size_t>(j);
                if (desc_.gls_orientations[k] > 0) return (x - gls_cum_[k]) / gls_sizes_[k];
                return (gls_cum_[k + 1] - x) / gls_sizes_[k];
            }
            case SystemKind::Beta: return betas_[0] * x - ctx_.make_long(static_cast<long>(j));
            case SystemKind::BetaFamily: return betas_[beta_index(sym)] * x - ctx_.make_long(static_cast<long>(j));
            case SystemKind::Gauss: return one_ / x - ctx_.make_long(static_cast<long>(j) + 1);
            case SystemKind::Renyi: return one_ / (one_ - x) - ctx_.make_long(static_cast<long>(j) + 1);
            case SystemKind::GaussRenyi:
                return sym == 0 ? one_ / x - ctx_.make_long(static_cast<long>(j) + 1)
                                : one_ / (one_ - x) - ctx_.make_long(static_cast<long>(j) + 1);
        }
        throw std::logic_error("apply_with_digit: bad kind");
    }

    // log|DT_i(x)|
    double log_deriv(long long sym, const S& x) const {
        switch (desc_.kind) {
            case SystemKind::IntegerBase: return std::log(static_cast<double>(base_of(sym)));
            case SystemKind::Gls: {
                CellResult<S> cr;
                if (cell_of(sym, x, cr) != CellStatus::Ok)
                    throw std::domain_error("log_deriv: no cell at this point");
                const std::size_t k = static_cast<std::size_t>(cr.digit);
                if (k > 0 && tri_equal(x, gls_cum_[k]) == Tri::True &&
                    desc_.gls_sizes[k - 1] != desc_.gls_sizes[k])
                    throw std::domain_error("log_deriv: derivative undefined at cell boundary");
                return -log_mpq(desc_.gls_sizes[k]);
            }
            case SystemKind::Beta: return desc_.betas[0].log_double();
            case SystemKind::BetaFamily: return desc_.betas[beta_index(sym)].log_double();
            case SystemKind::Gauss:
                if (tri_equal(x, zero_) == Tri::True)
                    throw std::domain_error("log_deriv: Gauss derivative undefined at 0");
                return -2.0 * x.log_value();
            case SystemKind::Renyi: return -2.0 * (one_ - x).log_value();
            case SystemKind::GaussRenyi: {
                if (sym == 0) {
                    if (tri_equal(x, zero_) == Tri::True)
                        throw std::domain_error("log_deriv: Gauss derivative undefined at 0");
                    return -2.0 * x.log_value();
                }
                return -2.0 * (one_ - x).log_value();
            }
        }
        throw std::logic_error("log_deriv: bad kind");
    }

    // inverse of T_i restricted to cell j, with domain T_i(A_{i,j})
    InverseBranch<S> inverse_branch(long long sym, long long j) const {
        switch (desc_.kind) {
            case SystemKind::IntegerBase: {
                const long b = base_of(sym);
                if (j < 0 || j >= b) throw std::invalid_argument("inverse_branch: empty cell");
                return InverseBranch<S>::affine(ctx_.make_mpq(mpq_class(1, b)),
                                                ctx_.make_mpq(mpq_class(static_cast<long>(j), b)), unit_half_open(),
                                                +1, ctx_);
            }
            case SystemKind::Gls: {
                const std::size_t k = cell_index_checked(j, desc_.gls_sizes.size());
                if (desc_.gls_orientations[k] > 0)
                    return InverseBranch<S>::affine(gls_sizes_[k], gls_cum_[k], unit_half_open(),
                                                    +1, ctx_);
                // reversed branch maps (0,1] back onto the cell
                return InverseBranch<S>::affine(-gls_sizes_[k], gls_cum_[k + 1],
                                                Interval<S>(zero_, one_, true, false), -1, ctx_);
            }
            case SystemKind::Beta: return beta_branch(0, j);
            case SystemKind::BetaFamily: return beta_branch(beta_index(sym), j);
            case SystemKind::Gauss: return gauss_branch(j);
            case SystemKind::Renyi: return renyi_branch(j);
            case SystemKind::GaussRenyi: return sym == 0 ? gauss_branch(j) : renyi_branch(j);
        }
        throw std::logic_error("inverse_branch: bad kind");
    }

    struct CellList {
        std::vector<std::pair<long long, Interval<S>>> cells;
        Interval<S> residual = Interval<S>::empty();  // uncovered part for capped families
    };

    CellList cells(long long sym, long long cap = 64) const {
        CellList out;
        switch (desc_.kind) {
            case SystemKind::IntegerBase: {
                const long b = base_of(sym);
                for (long j = 0; j < b; ++j)
                    out.cells.emplace_back(j, Interval<S>(ctx_.make_mpq(mpq_class(static_cast<long>(j), b)),
                                                          ctx_.make_mpq(mpq_class(static_cast<long>(j) + 1, b)), false,
                                                          true));
                return out;
            }
            case SystemKind::Gls: {
                for (std::size_t k = 0; k < gls_sizes_.size(); ++k)
                    out.cells.emplace_back(static_cast<long long>(k),
                                           Interval<S>(gls_cum_[k], gls_cum_[k + 1], false, true));
                return out;
            }
            case SystemKind::Beta:
            case SystemKind::BetaFamily: {
                const std::size_t bi = desc_.kind == SystemKind::Beta ? 0 : beta_index(sym);
                const long c = beta_ceils_[bi];
                for (long j = 0; j < c; ++j) out.cells.emplace_back(j, beta_cell(bi, j));
                return out;
            }
            case SystemKind::Gauss: {
                for (long long j = 0; j <= cap; ++j) out.cells.emplace_back(j, gauss_cell(j));
                out.residual = Interval<S>(zero_, ctx_.make_mpq(mpq_class(1L, static_cast<long>(cap) + 2)), true, false);
                return out;
            }
            case SystemKind::Renyi: {
                for (long long j = 0; j <= cap; ++j) out.cells.emplace_back(j, renyi_cell(j));
                out.residual =
                    Interval<S>(ctx_.make_mpq(mpq_class(static_cast<long>(cap) + 1, static_cast<long>(cap) + 2)), one_, false, true);
                return out;
            }
            case SystemKind::GaussRenyi: {
                if (sym == 0) {
                    for (long long j = 0; j <= cap; ++j) out.cells.emplace_back(j, gauss_cell(j));
                    out.residual =
                        Interval<S>(zero_, ctx_.make_mpq(mpq_class(1L, static_cast<long>(cap) + 2)), true, false);
                } else {
                    for (long long j = 0; j <= cap; ++j) out.cells.emplace_back(j, renyi_cell(j));
                    out.residual =
                        Interval<S>(ctx_.make_mpq(mpq_class(static_cast<long>(cap) + 1, static_cast<long>(cap) + 2)), one_, false, true);
                }
                return out;
            }
        }
        throw std::logic_error("cells: bad kind");
    }

    // Constant-slope (affine-branch) families admit an exact decomposition of
    // -log lambda(C_n) into per-branch slope counts; Moebius families do not.
    bool constant_slope() const {
        switch (desc_.kind) {
            case SystemKind::IntegerBase:
            case SystemKind::Gls:
            case SystemKind::Beta:
            case SystemKind::BetaFamily: return true;
            default: return false;
        }
    }

    // bucket key grouping branches of equal slope
    long long slope_bucket(long long sym, long long j) const {
        switch (desc_.kind) {
            case SystemKind::IntegerBase: return sym;
            case SystemKind::Gls: return j;
            case SystemKind::Beta: return 0;
            case SystemKind::BetaFamily: return sym;
            default: throw std::logic_error("slope_bucket: not a constant-slope family");
        }
    }

    double log_slope(long long bucket) const {
        switch (desc_.kind) {
            case SystemKind::IntegerBase: return std::log(static_cast<double>(bucket));
            case SystemKind::Gls: return -log_mpq(desc_.gls_sizes[static_cast<std::size_t>(bucket)]);
            case SystemKind::Beta: return desc_.betas[0].log_double();
            case SystemKind::BetaFamily:
                return desc_.betas[static_cast<std::size_t>(bucket)].log_double();
            default: throw std::logic_error("log_slope: not a constant-slope family");
        }
    }

    // x = 0 terminates expansions of the pure Gauss map
    bool zero_is_terminal() const { return desc_.kind == SystemKind::Gauss; }

    const S& gls_cum(std::size_t k) const { return gls_cum_[k]; }
    const S& gls_size(std::size_t k) const { return gls_sizes_[k]; }
    int gls_orientation(std::size_t k) const { return desc_.gls_orientations[k]; }
    const S& beta_of(long long sym) const {
        return betas_[desc_.kind == SystemKind::Beta ? 0 : beta_index(sym)];
    }

    Interval<S> unit_half_open() const { return Interval<S>(zero_, one_, false, true); }
    const S& zero() const { return zero_; }
    const S& one() const { return one_; }

private:
    long base_of(long long sym) const {
        for (long b : desc_.bases)
            if (b == sym) return b;
        throw std::invalid_argument("integer_base: unknown symbol " + std::to_string(sym));
    }

    std::size_t beta_index(long long sym) const {
        if (sym < 0 || static_cast<std::size_t>(sym) >= betas_.size())
            throw std::invalid_argument("beta_family: unknown symbol " + std::to_string(sym));
        return static_cast<std::size_t>(sym);
    }

    static std::size_t cell_index_checked(long long j, std::size_t n) {
        if (j < 0 || static_cast<std::size_t>(j) >= n)
            throw std::invalid_argument("inverse_branch: empty cell");
        return static_cast<std::size_t>(j);
    }

    void check_point(const S& x) const {
        if (tri_less(x, zero_) == Tri::True || tri_less_eq(one_, x) == Tri::True)
            throw std::domain_error("point outside [0,1)");
    }

    long ceil_of(const S& b) const {
        auto fl = floor_int(b);
        if (!fl) throw std::invalid_argument("beta: value too imprecise to determine ceil");
        const long f = static_cast<long>(fl->get_si());
        if (tri_equal(b, ctx_.make_long(f)) == Tri::True) return f;
        return f + 1;
    }

    static std::optional<long long> digit_from_floor(const std::optional<mpz_class>& f) {
        if (!f) return std::nullopt;
        if (!f->fits_slong_p()) throw std::domain_error("digit overflow");
        return static_cast<long long>(f->get_si());
    }

    CellStatus cell_integer_base(long b, const S& x, CellResult<S>& out) const {
        const auto j = digit_from_floor(floor_int(ctx_.make_long(b) * x));
        if (!j) return CellStatus::Ambiguous;
        if (*j < 0 || *j >= b) throw std::domain_error("point outside [0,1)");
        out.digit = *j;
        out.cell = Interval<S>(ctx_.make_mpq(mpq_class(static_cast<long>(*j), b)),
                               ctx_.make_mpq(mpq_class(static_cast<long>(*j) + 1, b)), false, true);
        return CellStatus::Ok;
    }

    CellStatus cell_gls(const S& x, CellResult<S>& out) const {
        for (std::size_t k = 0; k < gls_sizes_.size(); ++k) {
            const Tri lo_ok = tri_less_eq(gls_cum_[k], x);
            const Tri hi_ok = tri_less(x, gls_cum_[k + 1]);
            const Tri in = tri_and(lo_ok, hi_ok);
            if (in == Tri::True) {
                out.digit = static_cast<long long>(k);
                out.cell = Interval<S>(gls_cum_[k], gls_cum_[k + 1], false, true);
                return CellStatus::Ok;
            }
            if (in == Tri::Unknown) return CellStatus::Ambiguous;
        }
        throw std::domain_error("point outside [0,1)");
    }

    Interval<S> beta_cell(std::size_t bi, long long j) const {
        const S& b = betas_[bi];
        const long c = beta_ceils_[bi];
        if (j < 0 || j >= c) throw std::invalid_argument("beta: empty cell");
        const S lo = ctx_.make_long(static_cast<long>(j)) / b;
        if (j == c - 1) return Interval<S>(lo, one_, false, true);
        return Interval<S>(lo, ctx_.make_long(static_cast<long>(j) + 1) / b, false, true);
    }

    CellStatus cell_beta(std::size_t bi, const S& x, CellResult<S>& out) const {
        const auto j = digit_from_floor(floor_int(betas_[bi] * x));
        if (!j) return CellStatus::Ambiguous;
        if (*j < 0 || *j >= beta_ceils_[bi]) throw std::domain_error("point outside [0,1)");
        out.digit = *j;
        out.cell = beta_cell(bi, *j);
        return CellStatus::Ok;
    }

    Interval<S> gauss_cell(long long j) const {
        return Interval<S>(ctx_.make_mpq(mpq_class(1L, static_cast<long>(j) + 2)), ctx_.make_mpq(mpq_class(1L, static_cast<long>(j) + 1)),
                           true, false);
    }
    Interval<S> renyi_cell(long long j) const {
        return Interval<S>(ctx_.make_mpq(mpq_class(static_cast<long>(j), static_cast<long>(j) + 1)),
                           ctx_.make_mpq(mpq_class(static_cast<long>(j) + 1, static_cast<long>(j) + 2)), false, true);
    }

    CellStatus cell_gauss(const S& x, CellResult<S>& out) const {
        if (tri_equal(x, zero_) == Tri::True) return CellStatus::NoCell;
        std::optional<long long> j;
        try {
            const auto f = digit_from_floor(floor_int(one_ / x));
            if (!f) return CellStatus::Ambiguous;
            j = *f - 1;
        } catch (const enclosure_error&) {
            return CellStatus::Ambiguous;
        }
        if (*j < 0) throw std::domain_error("point outside [0,1)");
        out.digit = *j;
        out.cell = gauss_cell(*j);
        return CellStatus::Ok;
    }

    CellStatus cell_renyi(const S& x, CellResult<S>& out) const {
        std::optional<long long> j;
        try {
            const auto f = digit_from_floor(floor_int(one_ / (one_ - x)));
            if (!f) return CellStatus::Ambiguous;
            j = *f - 1;
        } catch (const enclosure_error&) {
            return CellStatus::Ambiguous;
        }
        if (*j < 0) throw std::domain_error("point outside [0,1)");
        out.digit = *j;
        out.cell = renyi_cell(*j);
        return CellStatus::Ok;
    }

    InverseBranch<S> beta_branch(std::size_t bi, long long j) const {
        const S& b = betas_[bi];
        const long c = beta_ceils_[bi];
        if (j < 0 || j >= c) throw std::invalid_argument("inverse_branch: empty cell");
        Interval<S> dom = unit_half_open();
        if (j == c - 1) {
            // non-full last branch: T maps [ (c-1)/b, 1 ) onto [0, b-c+1)
            dom = Interval<S>(zero_, b - ctx_.make_long(c - 1), false, true);
        }
        return InverseBranch<S>::affine(one_ / b, ctx_.make_long(static_cast<long>(j)) / b, std::move(dom), +1, ctx_);
    }

    InverseBranch<S> gauss_branch(long long j) const {
        if (j < 0) throw std::invalid_argument("inverse_branch: empty cell");
        return InverseBranch<S>::mobius(0, 1, 1, mpz_class(static_cast<long>(j) + 1), unit_half_open(), -1, ctx_);
    }

    InverseBranch<S> renyi_branch(long long j) const {
        if (j < 0) throw std::invalid_argument("inverse_branch: empty cell");
        return InverseBranch<S>::mobius(1, mpz_class(static_cast<long>(j)), 1, mpz_class(static_cast<long>(j) + 1), unit_half_open(), +1,
                                        ctx_);
    }

    SystemDescriptor desc_;
    scalar_ctx<S> ctx_;
    S zero_{}, one_{};
    std::vector<S> gls_sizes_;
    std::vector<S> gls_cum_;  // cumulative sums c_0=0..c_N=1
    std::vector<mpq_class> gls_cum_exact_;
    std::vector<S> betas_;
    std::vector<long> beta_ceils_;
};

}  // namespace rns
