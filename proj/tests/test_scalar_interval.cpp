#include <catch2/catch_amalgamated.hpp>

#include "rns/interval.hpp"
#include "rns/rng.hpp"
#include "rns/scalar.hpp"

using namespace rns;

namespace {

Rational rq(long n, long d) { return Rational(n, d); }

Interval<Rational> iv(long nl, long dl, long nh, long dh, bool lo_open = false,
                      bool hi_open = true) {
    return Interval<Rational>(rq(nl, dl), rq(nh, dh), lo_open, hi_open);
}

mpq_class rand_q(CounterRng& rng) {
    const long den = static_cast<long>(rng.next_below(999)) + 1;
    const long num = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(den) + 1));
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("interval measure") {
    CHECK(Interval<Rational>(rq(1, 3), rq(1, 2), false, false).measure() == rq(1, 6));
    CHECK(Interval<Rational>::empty().measure() == rq(0, 1));
    CHECK(iv(31, 100, 32, 100).measure() == rq(1, 100));
}

TEST_CASE("interval containment, exact backend") {
    // binary level-4 cylinder of 1/5 inside the first ternary cell
    CHECK(contains(iv(0, 1, 1, 3), iv(3, 16, 4, 16)) == Tri::True);
    // but not inside the level-2 ternary cell [1/9, 2/9): 1/4 > 2/9
    CHECK(contains(iv(1, 9, 2, 9), iv(3, 16, 1, 4)) == Tri::False);
    const auto a = iv(2, 7, 5, 7);
    CHECK(contains(a, a) == Tri::True);

    // openness at shared endpoints
    CHECK(contains(iv(0, 1, 1, 2), iv(0, 1, 1, 2, true, true)) == Tri::True);
    CHECK(contains(iv(0, 1, 1, 2), Interval<Rational>(rq(0, 1), rq(1, 2), false, false)) ==
          Tri::False);
    CHECK(contains(Interval<Rational>(rq(0, 1), rq(1, 2), false, false), iv(0, 1, 1, 2)) ==
          Tri::True);
    CHECK(contains(a, Interval<Rational>::empty()) == Tri::True);
}

TEST_CASE("containment is transitive on random nested triples") {
    CounterRng rng = CounterRng::substream(41, 7, 0);
    for (int it = 0; it < 500; ++it) {
        mpq_class xs[6];
        for (auto& x : xs) x = rand_q(rng);
        std::sort(std::begin(xs), std::end(xs));
        if (xs[0] == xs[5]) continue;
        const Interval<Rational> c(Rational{xs[0]}, Rational{xs[5]}, false, false);
        const Interval<Rational> b(Rational{xs[1]}, Rational{xs[4]}, false, false);
        const Interval<Rational> a(Rational{xs[2]}, Rational{xs[3]}, false, false);
        if (contains(b, a) == Tri::True && contains(c, b) == Tri::True)
            CHECK(contains(c, a) == Tri::True);
    }
}

TEST_CASE("enclosure arithmetic contains the exact rational result") {
    CounterRng rng = CounterRng::substream(42, 7, 0);
    auto holds = [](const Enclosure& e, const mpq_class& exact) {
        return mpq_class(e.lo()) <= exact && exact <= mpq_class(e.hi());
    };
    for (int it = 0; it < 2000; ++it) {
        const mpq_class qa = rand_q(rng), qb = rand_q(rng);
        const Enclosure a = Enclosure::from_mpq(qa), b = Enclosure::from_mpq(qb);
        CHECK(holds(a + b, qa + qb));
        CHECK(holds(a - b, qa - qb));
        CHECK(holds(a * b, qa * qb));
        if (qb != 0) CHECK(holds(a / b, mpq_class(qa / qb)));
    }
}

TEST_CASE("enclosure comparisons go unknown on ties") {
    const Enclosure half(0.5);
    CHECK(tri_less(half, half) == Tri::False);  // point enclosures compare exactly
    CHECK(tri_equal(half, half) == Tri::True);
    CHECK(tri_less(Enclosure(0.25), half) == Tri::True);
    CHECK(tri_less(half, Enclosure(0.25)) == Tri::False);
    const Enclosure wide(0.4, 0.6);
    CHECK(tri_less(wide, half) == Tri::Unknown);
    CHECK(tri_equal(wide, half) == Tri::Unknown);
}

TEST_CASE("enclosure containment never contradicts the exact answer") {
    CounterRng rng = CounterRng::substream(43, 7, 0);
    for (int it = 0; it < 1000; ++it) {
        mpq_class xs[4];
        for (auto& x : xs) x = rand_q(rng);
        std::sort(std::begin(xs), std::end(xs));
        const bool swap_inner = rng.next_below(2) == 1;
        const Interval<Rational> outer(Rational{xs[0]}, Rational{xs[3]}, false, true);
        const Interval<Rational> inner(Rational{xs[swap_inner ? 2 : 1]},
                                       Rational{xs[swap_inner ? 3 : 2]}, false, true);
        const Interval<Enclosure> fouter(Enclosure::from_mpq(xs[0]),
                                         Enclosure::from_mpq(xs[3]), false, true);
        const Interval<Enclosure> finner(Enclosure::from_mpq(inner.lo.value()),
                                         Enclosure::from_mpq(inner.hi.value()), false, true);
        const Tri exact = contains(outer, inner);
        const Tri approx = contains(fouter, finner);
        if (approx != Tri::Unknown) CHECK(approx == exact);
    }
}

TEST_CASE("big enclosure arithmetic and comparisons") {
    scalar_ctx<BigEnclosure> ctx;
    ctx.prec = 192;
    const BigEnclosure a = ctx.make_mpq(mpq_class(1, 3));
    const BigEnclosure b = ctx.make_mpq(mpq_class(1, 6));
    const BigEnclosure s = a + b;
    CHECK(tri_less(s, ctx.make_long(1)) == Tri::True);
    CHECK(tri_less(ctx.make_mpq(mpq_class(49, 100)), s) == Tri::True);
    CHECK(s.width() < 1e-40);
    auto fl = floor_int(ctx.make_mpq(mpq_class(7, 2)));
    REQUIRE(fl.has_value());
    CHECK(*fl == 3);
}

TEST_CASE("rational logs from mantissa decomposition") {
    mpz_class big = 1;
    for (int i = 0; i < 500; ++i) big *= 10;
    const double lg = log_mpz(big);
    CHECK(lg == Catch::Approx(500.0 * std::numbers::ln10).epsilon(1e-13));
    CHECK(log_mpq(mpq_class(1)) == 0.0);
    CHECK(log_mpq(mpq_class(1, 35)) == Catch::Approx(-std::log(35.0)).epsilon(1e-14));
}
