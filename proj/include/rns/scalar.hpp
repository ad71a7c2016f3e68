#pragma once

// Scalar backends: exact rationals (GMP), outward-rounded double enclosures,
// and arbitrary-precision enclosures (MPFR) for precision escalation.

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace rns {

// Three-valued truth: enclosure backends cannot always decide a comparison.
enum class Tri : std::int8_t { False = 0, True = 1, Unknown = 2 };

inline Tri tri_of(bool b) { return b ? Tri::True : Tri::False; }

inline Tri tri_not(Tri t) {
    if (t == Tri::Unknown) return Tri::Unknown;
    return tri_of(t == Tri::False);
}

inline Tri tri_and(Tri a, Tri b) {
    if (a == Tri::False || b == Tri::False) return Tri::False;
    if (a == Tri::True && b == Tri::True) return Tri::True;
    return Tri::Unknown;
}

inline Tri tri_or(Tri a, Tri b) {
    if (a == Tri::True || b == Tri::True) return Tri::True;
    if (a == Tri::False && b == Tri::False) return Tri::False;
    return Tri::Unknown;
}

// Thrown when an enclosure operation cannot proceed (divisor straddles zero,
// log of a nonpositive enclosure). Trackers turn this into AMBIGUOUS status.
struct enclosure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// log of a positive big integer via mantissa/exponent decomposition.
// Relative error is a few ulps independent of the integer's size.
inline double log_mpz(const mpz_class& z) {
    if (z <= 0) throw std::domain_error("log_mpz: nonpositive argument");
    if (z == 1) return 0.0;
    signed long exp2 = 0;
    const double m = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(m) + static_cast<double>(exp2) * std::numbers::ln2;
}

inline double log_mpq(const mpq_class& q) {
    if (q <= 0) throw std::domain_error("log_mpq: nonpositive argument");
    return log_mpz(q.get_num()) - log_mpz(q.get_den());
}

// ---------------------------------------------------------------------------
// Exact rational scalar over GMP integers. The stored fraction keeps den > 0
// but is reduced lazily: the tracker workloads (continued-fraction orbits,
// slope products, offset accumulation) preserve near-coprime fractions on
// their own, and an eager gcd per operation dominates the runtime at
// thousand-digit sizes. Observers (num, den, value, str) return the canonical
// form.
// ---------------------------------------------------------------------------
class Rational {
public:
    static constexpr bool exact = true;

    Rational() : num_(0), den_(1) {}
    explicit Rational(long n) : num_(n), den_(1) {}
    Rational(long n, long d) : num_(n), den_(d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        normalize_sign();
    }
    explicit Rational(const mpz_class& z) : num_(z), den_(1) {}
    explicit Rational(const mpq_class& q) : num_(q.get_num()), den_(q.get_den()) {}
    Rational(mpz_class n, mpz_class d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        normalize_sign();
    }

    static Rational from_mpq(const mpq_class& q) { return Rational(q); }
    static Rational from_long(long n) { return Rational(n); }

    mpq_class value() const {
        mpq_class q;
        mpq_set_num(q.get_mpq_t(), num_.get_mpz_t());
        mpq_set_den(q.get_mpq_t(), den_.get_mpz_t());
        q.canonicalize();
        return q;
    }
    mpz_class num() const { return value().get_num(); }
    mpz_class den() const { return value().get_den(); }

    Rational operator+(const Rational& o) const { return add_scaled(o, 1); }
    Rational operator-(const Rational& o) const { return add_scaled(o, -1); }

    Rational operator*(const Rational& o) const {
        return Rational(mpz_class(num_ * o.num_), mpz_class(den_ * o.den_));
    }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        return Rational(mpz_class(num_ * o.den_), mpz_class(den_ * o.num_));
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    int cmp(const Rational& o) const {
        if (den_ == o.den_) return ::cmp(num_, o.num_);
        const mpz_class lhs = num_ * o.den_;
        const mpz_class rhs = o.num_ * den_;
        return ::cmp(lhs, rhs);
    }
    bool operator==(const Rational& o) const { return cmp(o) == 0; }

    bool is_positive() const { return sgn(num_) > 0; }

    // Exact floor as a big integer; always defined.
    mpz_class floor_exact() const {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
        return r;
    }

    double to_double() const {
        if (num_ == 0) return 0.0;
        signed long en = 0, ed = 0;
        const double mn = mpz_get_d_2exp(&en, num_.get_mpz_t());
        const double md = mpz_get_d_2exp(&ed, den_.get_mpz_t());
        return std::ldexp(mn / md, static_cast<int>(en - ed));
    }

    double log_value() const {
        if (sgn(num_) <= 0) throw std::domain_error("Rational: log of nonpositive value");
        return log_mpz(num_) - log_mpz(den_);
    }

    double width() const { return 0.0; }

    std::string str() const { return value().get_str(); }

private:
    void normalize_sign() {
        if (sgn(den_) < 0) {
            num_ = -num_;
            den_ = -den_;
        }
    }

    // this + sign*o, keeping denominators from compounding when one divides
    // the other (the common case along tracker recurrences)
    Rational add_scaled(const Rational& o, int sign) const {
        Rational r;
        if (den_ == o.den_) {
            if (sign > 0)
                r.num_ = num_ + o.num_;
            else
                r.num_ = num_ - o.num_;
            r.den_ = den_;
            return r;
        }
        if (mpz_divisible_p(o.den_.get_mpz_t(), den_.get_mpz_t())) {
            mpz_class f;
            mpz_divexact(f.get_mpz_t(), o.den_.get_mpz_t(), den_.get_mpz_t());
            if (sign > 0)
                r.num_ = num_ * f + o.num_;
            else
                r.num_ = num_ * f - o.num_;
            r.den_ = o.den_;
            return r;
        }
        if (mpz_divisible_p(den_.get_mpz_t(), o.den_.get_mpz_t())) {
            mpz_class f;
            mpz_divexact(f.get_mpz_t(), den_.get_mpz_t(), o.den_.get_mpz_t());
            if (sign > 0)
                r.num_ = num_ + o.num_ * f;
            else
                r.num_ = num_ - o.num_ * f;
            r.den_ = den_;
            return r;
        }
        if (sign > 0)
            r.num_ = num_ * o.den_ + o.num_ * den_;
        else
            r.num_ = num_ * o.den_ - o.num_ * den_;
        r.den_ = den_ * o.den_;
        return r;
    }

    mpz_class num_, den_;  // den_ > 0, not necessarily coprime with num_
};

inline Tri tri_less(const Rational& a, const Rational& b) { return tri_of(a.cmp(b) < 0); }
inline Tri tri_less_eq(const Rational& a, const Rational& b) { return tri_of(a.cmp(b) <= 0); }
inline Tri tri_equal(const Rational& a, const Rational& b) { return tri_of(a.cmp(b) == 0); }

inline std::optional<mpz_class> floor_int(const Rational& a) { return a.floor_exact(); }

// ---------------------------------------------------------------------------
// Double enclosure [lo,hi] with directed rounding emulated by 1-ulp nudging
// after every operation.
// ---------------------------------------------------------------------------
class Enclosure {
public:
    static constexpr bool exact = false;

    Enclosure() : lo_(0), hi_(0) {}
    explicit Enclosure(double x) : lo_(x), hi_(x) {}
    Enclosure(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo <= hi)) throw std::invalid_argument("Enclosure: lo > hi");
    }
    explicit Enclosure(long n) : lo_(static_cast<double>(n)), hi_(static_cast<double>(n)) {
        // longs beyond 2^53 would not be exact; the library never needs them here
    }

    static Enclosure from_long(long n) { return Enclosure(n); }

    // Tightest 1-ulp enclosure of an exact rational.
    static Enclosure from_mpq(const mpq_class& q) {
        const double d = q.get_d();
        if (!std::isfinite(d)) {
            // magnitudes beyond double range: fall back to a crude but sound hull
            return d > 0 ? Enclosure(std::numeric_limits<double>::max(),
                                     std::numeric_limits<double>::infinity())
                         : Enclosure(-std::numeric_limits<double>::infinity(),
                                     -std::numeric_limits<double>::max());
        }
        const int c = ::cmp(mpq_class(d), q);
        if (c == 0) return Enclosure(d);
        if (c < 0) return Enclosure(d, up(d));
        return Enclosure(dn(d), d);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }

    Enclosure operator+(const Enclosure& o) const { return make(dn(lo_ + o.lo_), up(hi_ + o.hi_)); }
    Enclosure operator-(const Enclosure& o) const { return make(dn(lo_ - o.hi_), up(hi_ - o.lo_)); }
    Enclosure operator-() const { return make(-hi_, -lo_); }

    Enclosure operator*(const Enclosure& o) const {
        const double c1 = lo_ * o.lo_, c2 = lo_ * o.hi_, c3 = hi_ * o.lo_, c4 = hi_ * o.hi_;
        return make(dn(std::min(std::min(c1, c2), std::min(c3, c4))),
                    up(std::max(std::max(c1, c2), std::max(c3, c4))));
    }

    Enclosure operator/(const Enclosure& o) const {
        if (o.lo_ <= 0.0 && o.hi_ >= 0.0)
            throw enclosure_error("Enclosure: divisor straddles zero");
        const double c1 = lo_ / o.lo_, c2 = lo_ / o.hi_, c3 = hi_ / o.lo_, c4 = hi_ / o.hi_;
        return make(dn(std::min(std::min(c1, c2), std::min(c3, c4))),
                    up(std::max(std::max(c1, c2), std::max(c3, c4))));
    }

    bool operator==(const Enclosure& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

    double to_double() const { return 0.5 * (lo_ + hi_); }

    double log_value() const {
        if (lo_ <= 0.0) throw enclosure_error("Enclosure: log of nonpositive enclosure");
        return 0.5 * (std::log(lo_) + std::log(hi_));
    }

    std::string str() const {
        char buf[80];
        std::snprintf(buf, sizeof buf, "[%.17g,%.17g]", lo_, hi_);
        return buf;
    }

    static double dn(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
    static double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

    static Enclosure sqrt_ui(unsigned long n) {
        const double r = std::sqrt(static_cast<double>(n));
        return Enclosure(dn(r), up(r));
    }

private:
    static Enclosure make(double lo, double hi) { return Enclosure(lo, hi); }
    double lo_, hi_;
};

inline Tri tri_less(const Enclosure& a, const Enclosure& b) {
    if (a.hi() < b.lo()) return Tri::True;
    if (a.lo() >= b.hi()) return Tri::False;
    return Tri::Unknown;
}
inline Tri tri_less_eq(const Enclosure& a, const Enclosure& b) {
    if (a.hi() <= b.lo()) return Tri::True;
    if (a.lo() > b.hi()) return Tri::False;
    return Tri::Unknown;
}
inline Tri tri_equal(const Enclosure& a, const Enclosure& b) {
    if (a.hi() < b.lo() || b.hi() < a.lo()) return Tri::False;
    if (a.lo() == a.hi() && b.lo() == b.hi() && a.lo() == b.lo()) return Tri::True;
    return Tri::Unknown;
}

inline std::optional<mpz_class> floor_int(const Enclosure& a) {
    if (!std::isfinite(a.lo()) || !std::isfinite(a.hi())) return std::nullopt;
    const double fl = std::floor(a.lo()), fh = std::floor(a.hi());
    if (fl != fh) return std::nullopt;
    mpz_class z;
    mpz_set_d(z.get_mpz_t(), fl);
    return z;
}

// ---------------------------------------------------------------------------
// MPFR enclosure with native directed rounding. Precision is carried per
// value; binary operations widen to the larger operand precision.
// ---------------------------------------------------------------------------
class BigEnclosure {
public:
    static constexpr bool exact = false;

    explicit BigEnclosure(mpfr_prec_t prec = 128) : prec_(prec) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    BigEnclosure(const BigEnclosure& o) : prec_(o.prec_) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    BigEnclosure(BigEnclosure&& o) noexcept : prec_(o.prec_) {
        mpfr_init2(lo_, MPFR_PREC_MIN);
        mpfr_init2(hi_, MPFR_PREC_MIN);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }
    BigEnclosure& operator=(BigEnclosure o) noexcept {
        std::swap(prec_, o.prec_);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }
    ~BigEnclosure() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static BigEnclosure from_long_p(long n, mpfr_prec_t prec) {
        BigEnclosure r(prec);
        mpfr_set_si(r.lo_, n, MPFR_RNDD);
        mpfr_set_si(r.hi_, n, MPFR_RNDU);
        return r;
    }
    static BigEnclosure from_mpq_p(const mpq_class& q, mpfr_prec_t prec) {
        BigEnclosure r(prec);
        mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    // sqrt(n) enclosure, used for quadratic-irrational parameters
    static BigEnclosure sqrt_ui_p(unsigned long n, mpfr_prec_t prec) {
        BigEnclosure r(prec);
        mpfr_sqrt_ui(r.lo_, n, MPFR_RNDD);
        mpfr_sqrt_ui(r.hi_, n, MPFR_RNDU);
        return r;
    }

    mpfr_prec_t precision() const { return prec_; }

    BigEnclosure operator+(const BigEnclosure& o) const {
        BigEnclosure r(std::max(prec_, o.prec_));
        mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
        return r;
    }
    BigEnclosure operator-(const BigEnclosure& o) const {
        BigEnclosure r(std::max(prec_, o.prec_));
        mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
        mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
        return r;
    }
    BigEnclosure operator-() const {
        BigEnclosure r(prec_);
        mpfr_neg(r.lo_, hi_, MPFR_RNDD);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
        return r;
    }
    BigEnclosure operator*(const BigEnclosure& o) const {
        return corners(o, mpfr_mul);
    }
    BigEnclosure operator/(const BigEnclosure& o) const {
        if (mpfr_sgn(o.lo_) <= 0 && mpfr_sgn(o.hi_) >= 0)
            throw enclosure_error("BigEnclosure: divisor straddles zero");
        return corners(o, mpfr_div);
    }

    bool operator==(const BigEnclosure& o) const {
        return mpfr_equal_p(lo_, o.lo_) && mpfr_equal_p(hi_, o.hi_);
    }

    double to_double() const {
        return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
    }
    double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double width() const {
        mpfr_t d;
        mpfr_init2(d, 64);
        mpfr_sub(d, hi_, lo_, MPFR_RNDU);
        const double w = mpfr_get_d(d, MPFR_RNDU);
        mpfr_clear(d);
        return w;
    }

    double log_value() const {
        if (mpfr_sgn(lo_) <= 0) throw enclosure_error("BigEnclosure: log of nonpositive enclosure");
        mpfr_t t;
        mpfr_init2(t, 64);
        mpfr_log(t, lo_, MPFR_RNDN);
        const double a = mpfr_get_d(t, MPFR_RNDN);
        mpfr_log(t, hi_, MPFR_RNDN);
        const double b = mpfr_get_d(t, MPFR_RNDN);
        mpfr_clear(t);
        return 0.5 * (a + b);
    }

    std::string str() const {
        char buf[96];
        std::snprintf(buf, sizeof buf, "[%.17g,%.17g]@%ld", lo_double(), hi_double(),
                      static_cast<long>(prec_));
        return buf;
    }

    friend Tri tri_less(const BigEnclosure& a, const BigEnclosure& b) {
        if (mpfr_less_p(a.hi_, b.lo_)) return Tri::True;
        if (mpfr_greaterequal_p(a.lo_, b.hi_)) return Tri::False;
        return Tri::Unknown;
    }
    friend Tri tri_less_eq(const BigEnclosure& a, const BigEnclosure& b) {
        if (mpfr_lessequal_p(a.hi_, b.lo_)) return Tri::True;
        if (mpfr_greater_p(a.lo_, b.hi_)) return Tri::False;
        return Tri::Unknown;
    }
    friend Tri tri_equal(const BigEnclosure& a, const BigEnclosure& b) {
        if (mpfr_less_p(a.hi_, b.lo_) || mpfr_less_p(b.hi_, a.lo_)) return Tri::False;
        if (mpfr_equal_p(a.lo_, a.hi_) && mpfr_equal_p(b.lo_, b.hi_) && mpfr_equal_p(a.lo_, b.lo_))
            return Tri::True;
        return Tri::Unknown;
    }
    friend std::optional<mpz_class> floor_int(const BigEnclosure& a) {
        if (!mpfr_number_p(a.lo_) || !mpfr_number_p(a.hi_)) return std::nullopt;
        mpz_class fl, fh;
        mpfr_get_z(fl.get_mpz_t(), a.lo_, MPFR_RNDD);
        mpfr_get_z(fh.get_mpz_t(), a.hi_, MPFR_RNDD);
        if (fl != fh) return std::nullopt;
        return fl;
    }

    // componentwise hulls of pointwise max/min
    friend BigEnclosure enc_max(const BigEnclosure& a, const BigEnclosure& b) {
        BigEnclosure r(std::max(a.prec_, b.prec_));
        mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return r;
    }
    friend BigEnclosure enc_min(const BigEnclosure& a, const BigEnclosure& b) {
        BigEnclosure r(std::max(a.prec_, b.prec_));
        mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return r;
    }

private:
    using mpfr_binop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

    BigEnclosure corners(const BigEnclosure& o, mpfr_binop op) const {
        const mpfr_prec_t p = std::max(prec_, o.prec_);
        BigEnclosure r(p);
        mpfr_t c;
        mpfr_init2(c, p);
        bool first = true;
        const mpfr_srcptr as[2] = {lo_, hi_};
        const mpfr_srcptr bs[2] = {o.lo_, o.hi_};
        for (auto a : as)
            for (auto b : bs) {
                op(c, a, b, MPFR_RNDD);
                if (first || mpfr_less_p(c, r.lo_)) mpfr_set(r.lo_, c, MPFR_RNDD);
                op(c, a, b, MPFR_RNDU);
                if (first || mpfr_greater_p(c, r.hi_)) mpfr_set(r.hi_, c, MPFR_RNDU);
                first = false;
            }
        mpfr_clear(c);
        return r;
    }

    mpfr_prec_t prec_;
    mpfr_t lo_, hi_;
};

// Backend-generic construction helpers. Enclosure precision (for the MPFR
// backend) rides along via a context value.
template <class S>
struct scalar_ctx {
    S make_long(long n) const { return S::from_long(n); }
    S make_mpq(const mpq_class& q) const { return S::from_mpq(q); }
};

template <>
struct scalar_ctx<BigEnclosure> {
    mpfr_prec_t prec = 128;
    BigEnclosure make_long(long n) const { return BigEnclosure::from_long_p(n, prec); }
    BigEnclosure make_mpq(const mpq_class& q) const { return BigEnclosure::from_mpq_p(q, prec); }
};

template <class S>
concept ScalarBackend = requires(const S a, const S b) {
    { a + b } -> std::convertible_to<S>;
    { a - b } -> std::convertible_to<S>;
    { a* b } -> std::convertible_to<S>;
    { a / b } -> std::convertible_to<S>;
    { tri_less(a, b) } -> std::same_as<Tri>;
    { tri_less_eq(a, b) } -> std::same_as<Tri>;
    { tri_equal(a, b) } -> std::same_as<Tri>;
    { floor_int(a) } -> std::same_as<std::optional<mpz_class>>;
    { a.to_double() } -> std::same_as<double>;
    { a.width() } -> std::same_as<double>;
};

}  // namespace rns
