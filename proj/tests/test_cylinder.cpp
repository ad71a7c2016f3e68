#include <catch2/catch_amalgamated.hpp>

#include "rns/cylinder.hpp"
#include "rns/rng.hpp"

#include <numbers>

using namespace rns;

namespace {

Rational rq(long n, long d = 1) { return Rational(n, d); }
using SysQ = FiberedMapFamily<Rational>;
using TrkQ = CylinderTracker<Rational>;

mpq_class rand_grid_q(CounterRng& rng, int digits) {
    mpz_class k = 0, den = 1;
    for (int i = 0; i < digits; ++i) {
        k = k * 10 + static_cast<unsigned long>(rng.next_below(10));
        den *= 10;
    }
    mpq_class q(k, den);
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("fresh trackers start at the whole interval") {
    SysQ dec(SystemDescriptor::integer_base({10}));
    TrkQ t(dec, rq(1, 7));
    CHECK(t.n() == 0);
    CHECK(t.status() == TrackerStatus::Active);
    CHECK(t.cylinder_measure() == rq(1));
    CHECK(t.cylinder().lo == rq(0));
    CHECK(t.cylinder().hi == rq(1));

    SysQ gauss(SystemDescriptor::gauss());
    TrkQ g(gauss, rq(0));
    CHECK(g.status() == TrackerStatus::Active);  // termination happens on step

    CHECK_THROWS_AS(TrkQ(dec, rq(3, 2)), std::domain_error);
}

TEST_CASE("decimal digits and cylinders") {
    SysQ dec(SystemDescriptor::integer_base({10}));
    TrkQ t(dec, rq(314, 1000));
    t.step(10);
    t.step(10);
    CHECK(t.digits() == std::vector<long long>{3, 1});
    CHECK(t.cylinder().lo == rq(31, 100));
    CHECK(t.cylinder().hi == rq(32, 100));
    CHECK(t.cylinder_measure() == rq(1, 100));

    for (int i = 0; i < 3; ++i) t.step(10);
    CHECK(t.cylinder_measure() == rq(1, 100000));
    CHECK(t.neg_log_measure_rate() == std::log(10.0));
}

TEST_CASE("Gauss cylinders match continued fraction convergents") {
    SysQ gauss(SystemDescriptor::gauss());
    TrkQ t(gauss, rq(2, 5));
    t.step(0);
    CHECK(t.digits() == std::vector<long long>{1});
    t.step(0);
    CHECK(t.digits() == std::vector<long long>{1, 1});
    // 2/5 = [0;2,2]; the orbit hits 0, ending the expansion
    CHECK(t.status() == TrackerStatus::FiniteExpansion);

    const auto c = t.cylinder();
    CHECK(c.lo == rq(2, 5));
    CHECK(c.hi == rq(3, 7));
    CHECK(t.cylinder_measure() == rq(1, 35));

    // composed branch is y -> (y+2)/(2y+5)
    const auto& phi = t.composed();
    REQUIRE(phi.kind == BranchKind::Mobius);
    CHECK(phi.p == 1);
    CHECK(phi.q == 2);
    CHECK(phi.r == 2);
    CHECK(phi.s == 5);

    // convergent-recurrence oracle for CF digits a_1 = a_2 = 2:
    // p_k = a_k p_{k-1} + p_{k-2}, q_k likewise; the level-2 cylinder spans
    // [p_2/q_2, (p_2+p_1)/(q_2+q_1)]
    const long a1 = 2, a2 = 2;
    const long p1 = 1, q1 = a1, p2 = a2 * p1 + 0, q2 = a2 * q1 + 1;
    CHECK(c.lo == rq(p2, q2));
    CHECK(c.hi == rq(p2 + p1, q2 + q1));
}

TEST_CASE("non-full beta branches restrict the admissible interval") {
    SysQ b32(SystemDescriptor::beta(BetaSpec::exact_value(mpq_class(3, 2))));
    TrkQ t(b32, rq(9, 10));
    t.step(0);
    CHECK(t.digits() == std::vector<long long>{1});
    CHECK(t.cylinder().lo == rq(2, 3));  // [1/beta, 1)
    CHECK(t.cylinder().hi == rq(1));
    CHECK(t.admissible().lo == rq(0));  // J_1 = [0, beta-1)
    CHECK(t.admissible().hi == rq(1, 2));
    CHECK(t.admissible().hi_open);
}

TEST_CASE("cylinder measures multiply along full constant-slope branches") {
    SysQ sys(SystemDescriptor::integer_base({2, 3}));
    TrkQ t(sys, rq(1, 7));
    t.step(2);
    t.step(3);
    CHECK(t.cylinder_measure() == rq(1, 6));

    CounterRng rng = CounterRng::substream(7, 3, 1);
    TrkQ u(sys, Rational{rand_grid_q(rng, 30)});
    mpq_class expect = 1;
    for (int i = 0; i < 40; ++i) {
        const long long sym = rng.next_below(2) == 0 ? 2 : 3;
        u.step(sym);
        expect /= static_cast<long>(sym);
    }
    CHECK(u.cylinder_measure().value() == expect);
}

TEST_CASE("nesting and membership invariants hold along random trajectories") {
    CounterRng rng = CounterRng::substream(11, 3, 0);
    std::vector<SysQ> systems;
    systems.emplace_back(SystemDescriptor::integer_base({2, 3}));
    systems.emplace_back(SystemDescriptor::gauss_renyi());
    systems.emplace_back(SystemDescriptor::beta(BetaSpec::exact_value(mpq_class(5, 2))));
    systems.emplace_back(SystemDescriptor::gls({mpq_class(1, 3), mpq_class(2, 3)}, {+1, -1}));
    const bool full_run = std::getenv("RNS_FULL_PROPERTY_RUN") != nullptr;
    const int trajectories = full_run ? 1000 : 200;
    for (int traj = 0; traj < trajectories; ++traj) {
        const auto& sys = systems[traj % systems.size()];
        const auto syms = sys.symbols();
        const Rational x0{rand_grid_q(rng, 40)};
        TrkQ t(sys, x0);
        Interval<Rational> prev = t.cylinder();
        for (int k = 0; k < 50 && t.status() == TrackerStatus::Active; ++k) {
            t.step(syms[rng.next_below(syms.size())]);
            const auto& cur = t.cylinder();
            CHECK(contains(prev, cur) == Tri::True);
            if (t.status() == TrackerStatus::Active) {
                CHECK(contains_point(cur, x0) == Tri::True);
                CHECK(contains_point(t.admissible(), t.point()) == Tri::True);
            }
            // full-branch families keep J = [0,1)
            if (sys.kind() == SystemKind::IntegerBase || sys.kind() == SystemKind::GaussRenyi) {
                CHECK(t.admissible().lo == rq(0));
                CHECK(t.admissible().hi == rq(1));
            }
            prev = cur;
        }
    }
}

TEST_CASE("Gauss composed denominators grow at least like Fibonacci") {
    SysQ gauss(SystemDescriptor::gauss());
    CounterRng rng = CounterRng::substream(12, 3, 0);
    TrkQ t(gauss, Rational{rand_grid_q(rng, 120)});
    mpz_class fib_prev = 1, fib = 1;  // Fibonacci(1), Fibonacci(2)
    for (int n = 1; n <= 40 && t.status() == TrackerStatus::Active; ++n) {
        t.step(0);
        const Rational at0 = t.composed().eval(rq(0));
        CHECK(at0.den() >= fib);
        const mpz_class next = fib + fib_prev;
        fib_prev = fib;
        fib = next;
    }
}

TEST_CASE("terminating orbits flag finite expansions") {
    SysQ gauss(SystemDescriptor::gauss());
    TrkQ t(gauss, rq(0));
    t.step(0);
    CHECK(t.status() == TrackerStatus::FiniteExpansion);
    CHECK(t.digits() == std::vector<long long>{kSentinelDigit});
    CHECK(t.n() == 0);
    CHECK_THROWS_AS(t.step(0), std::logic_error);

    // reversed GLS cell endpoint maps to 1
    SysQ gls(SystemDescriptor::gls({mpq_class(1, 2), mpq_class(1, 2)}, {+1, -1}));
    TrkQ u(gls, rq(1, 2));
    u.step(0);
    CHECK(u.status() == TrackerStatus::FiniteExpansion);
}

TEST_CASE("ambiguous digits stop enclosure trackers") {
    FiberedMapFamily<Enclosure> sys(SystemDescriptor::integer_base({2}));
    CylinderTracker<Enclosure> t(sys, Enclosure(0.5 - 1e-13, 0.5 + 1e-13));
    t.step(2);
    CHECK(t.status() == TrackerStatus::Ambiguous);
    CHECK(t.n() == 0);
}

TEST_CASE("neg log measure agrees with the direct big-rational log") {
    CounterRng rng = CounterRng::substream(13, 3, 0);
    SysQ sys(SystemDescriptor::integer_base({2, 3}));
    TrkQ t(sys, Rational{rand_grid_q(rng, 50)});
    for (int i = 0; i < 200; ++i) t.step(rng.next_below(2) == 0 ? 2 : 3);
    const double direct = -log_mpq(t.cylinder_measure().value());
    CHECK(t.neg_log_measure() == Catch::Approx(direct).epsilon(1e-12));

    SysQ gauss(SystemDescriptor::gauss());
    TrkQ g(gauss, Rational{rand_grid_q(rng, 100)});
    for (int i = 0; i < 60 && g.status() == TrackerStatus::Active; ++i) g.step(0);
    const double gd = -log_mpq(g.cylinder_measure().value());
    CHECK(g.neg_log_measure() == Catch::Approx(gd).epsilon(1e-12));
}
