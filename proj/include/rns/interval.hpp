#pragma once

// Subintervals of [0,1] with endpoint openness flags. Containment is exact
// (openness-aware) on the rational backend; on enclosure backends only
// certainly-strict comparisons decide and ties report Unknown.

#include "rns/scalar.hpp"

#include <string>

namespace rns {

template <class S>
struct Interval {
    S lo{};
    S hi{};
    bool lo_open = false;
    bool hi_open = false;
    bool is_empty = false;

    Interval() = default;
    Interval(S lo_, S hi_, bool lo_open_, bool hi_open_)
        : lo(std::move(lo_)), hi(std::move(hi_)), lo_open(lo_open_), hi_open(hi_open_) {}

    static Interval empty() {
        Interval iv;
        iv.is_empty = true;
        return iv;
    }
    static Interval point(S x) { return Interval(x, x, false, false); }
    // [0,1)
    static Interval unit(const scalar_ctx<S>& ctx = {}) {
        return Interval(ctx.make_long(0), ctx.make_long(1), false, true);
    }

    S measure() const {
        if (is_empty) return lo - lo;
        return hi - lo;
    }
};

// inner subset of outer, honoring openness where the backend can decide it.
template <class S>
Tri contains(const Interval<S>& outer, const Interval<S>& inner) {
    if (inner.is_empty) return Tri::True;
    if (outer.is_empty) return Tri::False;
    Tri lower, upper;
    if constexpr (S::exact) {
        const bool lo_tie_ok = !outer.lo_open || inner.lo_open;
        const bool hi_tie_ok = !outer.hi_open || inner.hi_open;
        lower = lo_tie_ok ? tri_less_eq(outer.lo, inner.lo) : tri_less(outer.lo, inner.lo);
        upper = hi_tie_ok ? tri_less_eq(inner.hi, outer.hi) : tri_less(inner.hi, outer.hi);
    } else {
        // Strict certain inequalities decide regardless of openness; flags are
        // not trusted on enclosure backends, so possible ties stay Unknown.
        lower = tri_less(outer.lo, inner.lo);
        if (lower == Tri::False && tri_less(inner.lo, outer.lo) != Tri::True) lower = Tri::Unknown;
        upper = tri_less(inner.hi, outer.hi);
        if (upper == Tri::False && tri_less(outer.hi, inner.hi) != Tri::True) upper = Tri::Unknown;
    }
    return tri_and(lower, upper);
}

template <class S>
Tri contains_point(const Interval<S>& iv, const S& x) {
    if (iv.is_empty) return Tri::False;
    Tri lower, upper;
    if constexpr (S::exact) {
        lower = iv.lo_open ? tri_less(iv.lo, x) : tri_less_eq(iv.lo, x);
        upper = iv.hi_open ? tri_less(x, iv.hi) : tri_less_eq(x, iv.hi);
    } else {
        lower = tri_less(iv.lo, x);
        if (lower == Tri::False && tri_less(x, iv.lo) != Tri::True) lower = Tri::Unknown;
        upper = tri_less(x, iv.hi);
        if (upper == Tri::False && tri_less(iv.hi, x) != Tri::True) upper = Tri::Unknown;
    }
    return tri_and(lower, upper);
}

template <class S>
Interval<S> intersect(const Interval<S>& a, const Interval<S>& b) {
    if (a.is_empty || b.is_empty) return Interval<S>::empty();
    Interval<S> r;
    if constexpr (S::exact) {
        const int cl = a.lo.cmp(b.lo);
        if (cl > 0) {
            r.lo = a.lo;
            r.lo_open = a.lo_open;
        } else if (cl < 0) {
            r.lo = b.lo;
            r.lo_open = b.lo_open;
        } else {
            r.lo = a.lo;
            r.lo_open = a.lo_open || b.lo_open;
        }
        const int ch = a.hi.cmp(b.hi);
        if (ch < 0) {
            r.hi = a.hi;
            r.hi_open = a.hi_open;
        } else if (ch > 0) {
            r.hi = b.hi;
            r.hi_open = b.hi_open;
        } else {
            r.hi = a.hi;
            r.hi_open = a.hi_open || b.hi_open;
        }
        const int c = r.lo.cmp(r.hi);
        if (c > 0 || (c == 0 && (r.lo_open || r.hi_open))) return Interval<S>::empty();
        return r;
    } else {
        // hull of the pointwise max/min; flags advisory only on this backend
        const Tri tl = tri_less(a.lo, b.lo);
        if (tl == Tri::True) {
            r.lo = b.lo;
            r.lo_open = b.lo_open;
        } else if (tl == Tri::False) {
            r.lo = a.lo;
            r.lo_open = a.lo_open;
        } else {
            r.lo = enc_max(a.lo, b.lo);
            r.lo_open = a.lo_open || b.lo_open;
        }
        const Tri th = tri_less(a.hi, b.hi);
        if (th == Tri::True) {
            r.hi = a.hi;
            r.hi_open = a.hi_open;
        } else if (th == Tri::False) {
            r.hi = b.hi;
            r.hi_open = b.hi_open;
        } else {
            r.hi = enc_min(a.hi, b.hi);
            r.hi_open = a.hi_open || b.hi_open;
        }
        if (tri_less(r.hi, r.lo) == Tri::True) return Interval<S>::empty();
        return r;
    }
}

inline Enclosure enc_max(const Enclosure& a, const Enclosure& b) {
    return Enclosure(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}
inline Enclosure enc_min(const Enclosure& a, const Enclosure& b) {
    return Enclosure(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

template <class S>
std::string to_string(const Interval<S>& iv) {
    if (iv.is_empty) return "(empty)";
    return std::string(iv.lo_open ? "(" : "[") + iv.lo.str() + "," + iv.hi.str() +
           (iv.hi_open ? ")" : "]");
}

}  // namespace rns
