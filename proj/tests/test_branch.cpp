#include <catch2/catch_amalgamated.hpp>

#include "rns/branch.hpp"
#include "rns/rng.hpp"

using namespace rns;

namespace {

Rational rq(long n, long d = 1) { return Rational(n, d); }

Interval<Rational> unit_ho() { return Interval<Rational>(rq(0), rq(1), false, true); }

bool same_interval(const Interval<Rational>& a, const Interval<Rational>& b) {
    if (a.is_empty || b.is_empty) return a.is_empty == b.is_empty;
    return a.lo == b.lo && a.hi == b.hi && a.lo_open == b.lo_open && a.hi_open == b.hi_open;
}

InverseBranch<Rational> gauss_like(long digit) {
    return InverseBranch<Rational>::mobius(0, 1, 1, digit + 1, unit_ho(), -1);
}

mpq_class rand_unit_q(CounterRng& rng) {
    const long den = static_cast<long>(rng.next_below(997)) + 2;
    const long num = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(den)));
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("branch apply on intervals") {
    // decimal digit-3 branch
    const auto dec3 =
        InverseBranch<Rational>::affine(rq(1, 10), rq(3, 10), unit_ho(), +1);
    CHECK(same_interval(dec3.apply(unit_ho()),
                        Interval<Rational>(rq(3, 10), rq(4, 10), false, true)));

    // Gauss digit-1 branch y -> 1/(y+2) reverses orientation: endpoints 0 -> 1/2, 1 -> 1/3
    const auto g1 = gauss_like(1);
    const Interval<Rational> closed01(rq(0), rq(1), false, false);
    CHECK(same_interval(g1.apply(closed01),
                        Interval<Rational>(rq(1, 3), rq(1, 2), false, false)));

    const auto id = InverseBranch<Rational>::identity();
    const auto some = Interval<Rational>(rq(2, 7), rq(5, 7), true, false);
    CHECK(same_interval(id.apply(some), some));
}

TEST_CASE("branch composition") {
    SECTION("Moebius x Moebius follows the matrix product") {
        const auto c = compose(gauss_like(1), gauss_like(1));
        // oracle: (0,1;1,2)*(0,1;1,2)
        const mpz_class p = 0 * 0 + 1 * 1, q = 0 * 1 + 1 * 2, r = 1 * 0 + 2 * 1,
                        s = 1 * 1 + 2 * 2;
        CHECK(c.kind == BranchKind::Mobius);
        CHECK(c.p == p);
        CHECK(c.q == q);
        CHECK(c.r == r);
        CHECK(c.s == s);
        CHECK(c.orientation == +1);
    }
    SECTION("affine x affine composes symbolically") {
        const auto outer = InverseBranch<Rational>::affine(rq(1, 10), rq(3, 10), unit_ho(), +1);
        const auto inner = InverseBranch<Rational>::affine(rq(1, 10), rq(1, 10), unit_ho(), +1);
        const auto c = compose(outer, inner);
        CHECK(c.kind == BranchKind::Affine);
        CHECK(c.a == rq(1, 100));
        CHECK(c.b == rq(31, 100));
        CHECK(c.orientation == +1);
    }
    SECTION("identity is neutral") {
        const auto g = gauss_like(4);
        const auto c = compose(InverseBranch<Rational>::identity(), g);
        CounterRng rng = CounterRng::substream(7, 1, 0);
        for (int i = 0; i < 5; ++i) {
            const Rational y{rand_unit_q(rng)};
            CHECK(c.eval(y) == g.eval(y));
        }
    }
}

TEST_CASE("compose then apply equals apply twice, exactly") {
    CounterRng rng = CounterRng::substream(8, 1, 0);
    for (int it = 0; it < 200; ++it) {
        const long db = static_cast<long>(rng.next_below(9)) + 2;
        const long dj = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(db)));
        const auto f = gauss_like(static_cast<long>(rng.next_below(6)));
        const auto g = it % 2 == 0
                           ? InverseBranch<Rational>::affine(rq(1, db), rq(dj, db), unit_ho(), +1)
                           : gauss_like(static_cast<long>(rng.next_below(6)));
        const auto iv = Interval<Rational>(rq(1, 5), rq(3, 4), false, true);
        const auto lhs = compose(f, g).apply(iv);
        const auto rhs = f.apply(g.apply(iv));
        CHECK(same_interval(lhs, rhs));
    }
}

TEST_CASE("gcd reduction does not change the represented map") {
    // entries with a common factor 3
    const auto br = InverseBranch<Rational>::mobius(0, 3, 3, 6, unit_ho(), -1);
    CHECK(br.q == 1);
    CHECK(br.s == 2);
    CounterRng rng = CounterRng::substream(9, 1, 0);
    for (int i = 0; i < 3; ++i) {
        const mpq_class y = rand_unit_q(rng);
        const mpq_class expect = mpq_class(0 * y + 3) / mpq_class(3 * y + 6);
        CHECK(br.eval(Rational(y)).value() == expect);
    }
}

TEST_CASE("mixed composition embeds the affine part") {
    const auto aff = InverseBranch<Rational>::affine(rq(1, 2), rq(1, 4), unit_ho(), +1);
    const auto g = gauss_like(0);  // y -> 1/(y+1)
    const auto c = compose(aff, g);
    REQUIRE(c.kind == BranchKind::Mobius);
    CounterRng rng = CounterRng::substream(10, 1, 0);
    for (int i = 0; i < 5; ++i) {
        const Rational y{rand_unit_q(rng)};
        CHECK(c.eval(y) == aff.eval(g.eval(y)));
    }
    CHECK(c.orientation == -1);
}

TEST_CASE("forward interval inverts apply") {
    const auto g = gauss_like(2);
    const auto iv = Interval<Rational>(rq(1, 7), rq(2, 3), false, true);
    const auto img = g.apply(iv);
    const auto back = g.forward_interval(img);
    CHECK(same_interval(back, iv));
}
