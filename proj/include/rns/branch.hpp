#pragma once

// Inverse branches of the maps T_i restricted to one partition cell: affine
// y ↦ a·y + b, or Möbius y ↦ (p·y+q)/(r·y+s) with an exact integer matrix.
// Level-n cylinders are images of composed inverse branches.

#include "rns/interval.hpp"
#include "rns/scalar.hpp"

#include <stdexcept>
#include <type_traits>

namespace rns {

enum class BranchKind { Affine, Mobius };

template <class S>
struct InverseBranch {
    BranchKind kind = BranchKind::Affine;
    S a{};  // affine slope
    S b{};  // affine offset
    mpz_class p, q, r, s;
    int orientation = +1;
    Interval<S> domain;  // T_i(A_{i,j})
    scalar_ctx<S> ctx{};

    static InverseBranch identity(const scalar_ctx<S>& ctx = {}) {
        InverseBranch br;
        br.kind = BranchKind::Affine;
        br.a = ctx.make_long(1);
        br.b = ctx.make_long(0);
        br.orientation = +1;
        br.domain = Interval<S>(ctx.make_long(0), ctx.make_long(1), false, false);
        br.ctx = ctx;
        return br;
    }

    static InverseBranch affine(S slope, S offset, Interval<S> dom, int orient,
                                const scalar_ctx<S>& ctx = {}) {
        InverseBranch br;
        br.kind = BranchKind::Affine;
        br.a = std::move(slope);
        br.b = std::move(offset);
        br.domain = std::move(dom);
        br.orientation = orient;
        br.ctx = ctx;
        return br;
    }

    static InverseBranch mobius(mpz_class p_, mpz_class q_, mpz_class r_, mpz_class s_,
                                Interval<S> dom, int orient, const scalar_ctx<S>& ctx = {}) {
        InverseBranch br;
        br.kind = BranchKind::Mobius;
        br.p = std::move(p_);
        br.q = std::move(q_);
        br.r = std::move(r_);
        br.s = std::move(s_);
        if (br.p * br.s - br.q * br.r == 0)
            throw std::invalid_argument("InverseBranch: singular Moebius matrix");
        br.domain = std::move(dom);
        br.orientation = orient;
        br.ctx = ctx;
        br.reduce();
        return br;
    }

    S eval(const S& y) const {
        if (kind == BranchKind::Affine) return a * y + b;
        const S num = mz(p) * y + mz(q);
        const S den = mz(r) * y + mz(s);
        return num / den;
    }

    // Image of an interval under this (monotone) branch.
    Interval<S> apply(const Interval<S>& iv) const {
        if (iv.is_empty) return Interval<S>::empty();
        Interval<S> out;
        if (orientation > 0) {
            out = Interval<S>(eval(iv.lo), eval(iv.hi), iv.lo_open, iv.hi_open);
        } else {
            out = Interval<S>(eval(iv.hi), eval(iv.lo), iv.hi_open, iv.lo_open);
        }
        return out;
    }

    // The underlying forward map T_i on the branch (inverse of eval).
    S forward(const S& x) const {
        if (kind == BranchKind::Affine) return (x - b) / a;
        const S num = mz(s) * x - mz(q);
        const S den = mz(p) - mz(r) * x;
        return num / den;
    }

    Interval<S> forward_interval(const Interval<S>& iv) const {
        if (iv.is_empty) return Interval<S>::empty();
        if (orientation > 0)
            return Interval<S>(forward(iv.lo), forward(iv.hi), iv.lo_open, iv.hi_open);
        return Interval<S>(forward(iv.hi), forward(iv.lo), iv.hi_open, iv.lo_open);
    }

    void reduce() {
        mpz_class g = gcd(gcd(abs(p), abs(q)), gcd(abs(r), abs(s)));
        if (g > 1) {
            p /= g;
            q /= g;
            r /= g;
            s /= g;
        }
        if (s < 0 || (s == 0 && r < 0)) {
            p = -p;
            q = -q;
            r = -r;
            s = -s;
        }
    }

private:
    S mz(const mpz_class& z) const { return ctx.make_mpq(mpq_class(z)); }
};

// outer ∘ inner. Mixed kinds embed the affine part as an integer matrix,
// which requires exact rational coefficients.
template <class S>
InverseBranch<S> compose(const InverseBranch<S>& outer, const InverseBranch<S>& inner) {
    // the identity (the tracker's seed branch) composes on every backend
    if (outer.kind == BranchKind::Affine && inner.kind == BranchKind::Mobius) {
        scalar_ctx<S> ctx = inner.ctx;
        if (tri_equal(outer.a, ctx.make_long(1)) == Tri::True &&
            tri_equal(outer.b, ctx.make_long(0)) == Tri::True)
            return inner;
    }
    InverseBranch<S> out;
    out.ctx = inner.ctx;
    out.orientation = outer.orientation * inner.orientation;
    out.domain = inner.domain;
    if (outer.kind == BranchKind::Affine && inner.kind == BranchKind::Affine) {
        out.kind = BranchKind::Affine;
        out.a = outer.a * inner.a;
        out.b = outer.a * inner.b + outer.b;
        return out;
    }
    if (outer.kind == BranchKind::Mobius && inner.kind == BranchKind::Mobius) {
        out.kind = BranchKind::Mobius;
        out.p = outer.p * inner.p + outer.q * inner.r;
        out.q = outer.p * inner.q + outer.q * inner.s;
        out.r = outer.r * inner.p + outer.s * inner.r;
        out.s = outer.r * inner.q + outer.s * inner.s;
        out.reduce();
        return out;
    }
    if constexpr (std::is_same_v<S, Rational>) {
        auto as_matrix = [](const InverseBranch<S>& br, mpz_class& p, mpz_class& q, mpz_class& r,
                            mpz_class& s) {
            if (br.kind == BranchKind::Mobius) {
                p = br.p;
                q = br.q;
                r = br.r;
                s = br.s;
                return;
            }
            const mpq_class& av = br.a.value();
            const mpq_class& bv = br.b.value();
            p = av.get_num() * bv.get_den();
            q = bv.get_num() * av.get_den();
            r = 0;
            s = av.get_den() * bv.get_den();
        };
        mpz_class op, oq, orr, os, ip, iq, ir, is;
        as_matrix(outer, op, oq, orr, os);
        as_matrix(inner, ip, iq, ir, is);
        out.kind = BranchKind::Mobius;
        out.p = op * ip + oq * ir;
        out.q = op * iq + oq * is;
        out.r = orr * ip + os * ir;
        out.s = orr * iq + os * is;
        out.reduce();
        return out;
    } else {
        throw std::domain_error("compose: mixed branch kinds need the exact backend");
    }
}

}  // namespace rns
