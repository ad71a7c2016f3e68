// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here and the master seed is fixed, so a
// rerun is bit-identical.

#include "rns/entropy.hpp"
#include "rns/lochs.hpp"
#include "rns/oracle.hpp"

#include <cinttypes>
#include <cstdarg>
#include <cstdio>
#include <thread>

using namespace rns;

namespace {

constexpr std::uint64_t kSeed = 20240810;
int failures = 0;

unsigned worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min(hw, 8u);
}

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s  [%s]\n", pass ? "PASS" : "FAIL", id, title,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

const BaseProcess kBern23 = BaseProcess::bernoulli({2, 3}, {mpq_class(1, 2), mpq_class(1, 2)});
const double kLogSqrt6 = 0.5 * (std::log(2.0) + std::log(3.0));

// ---------------------------------------------------------------------------

void criterion1_lochs_constant() {
    FiberedMapFamily<Rational> dec(SystemDescriptor::integer_base({10}));
    FiberedMapFamily<Rational> gauss(SystemDescriptor::gauss());
    LochsExperimentParams p;
    p.n = 1000;
    p.trials = 50;
    p.seed = kSeed;
    p.precision_digits = 2000;
    p.ratio_hint = 1.0;
    p.threads = worker_threads();
    const auto res = lochs_ratio_experiment<Rational>(dec, BaseProcess::singleton(10), gauss,
                                                      BaseProcess::singleton(0), p);
    const double target = 0.970270;
    const bool pass = std::abs(res.ratio.mean - target) < 0.01 && res.included > 0;
    report(1, "Lochs constant, decimal vs Gauss", pass,
           fmt("mean m(n)/n = %.6f vs %.6f, |diff| = %.6f < 0.01, included %ld/50",
               res.ratio.mean, target, std::abs(res.ratio.mean - target), res.included));
}

void criterion2_random_lochs_ratio() {
    FiberedMapFamily<Rational> t23(SystemDescriptor::integer_base({2, 3}));
    FiberedMapFamily<Rational> dec(SystemDescriptor::integer_base({10}));
    LochsExperimentParams p;
    p.n = 2000;
    p.trials = 200;
    p.seed = kSeed + 1;
    p.precision_digits = 2000;
    p.ratio_hint = 0.4;
    p.threads = worker_threads();
    const auto res =
        lochs_ratio_experiment<Rational>(t23, kBern23, dec, BaseProcess::singleton(10), p);
    const double target = 0.389075;
    const bool pass = std::abs(res.ratio.mean - target) < 0.01;
    report(2, "random Lochs ratio, mixed bases {2,3} vs decimal", pass,
           fmt("mean m(n)/n = %.6f vs %.6f, |diff| = %.6f < 0.01, included %ld/200",
               res.ratio.mean, target, std::abs(res.ratio.mean - target), res.included));
}

void criterion3_entropy_triangulation() {
    EstimatorParams p;
    p.n = 5000;
    p.trials = 100;
    p.seed = kSeed + 2;
    p.precision_digits = 64;
    p.threads = worker_threads();

    bool pass = true;
    std::string detail;
    auto check_one = [&](const char* label, const EntropyEstimate& est) {
        const double dev = std::abs(est.value - kLogSqrt6);
        // 1e-9 absorbs float summation noise when an estimator is exact (se = 0)
        const bool ok = dev <= 2.0 * est.stderr_ + 1e-9;
        pass = pass && ok;
        detail += fmt("%s%s=%.6f(se %.6f)", detail.empty() ? "" : ", ", label, est.value,
                      est.stderr_);
    };
    {
        FiberedMapFamily<Rational> sys(SystemDescriptor::integer_base({2, 3}));
        check_one("smb", smb_estimate(sys, kBern23, p));
        check_one("rokhlin", rokhlin_estimate(sys, kBern23, p));
        check_one("plugin_ar", plugin_ar_estimate(sys, kBern23, p));
    }
    {
        FiberedMapFamily<Rational> alt(SystemDescriptor::beta_family(
            {BetaSpec::exact_value(3), BetaSpec::exact_value(2)}));
        const BaseProcess word = BaseProcess::periodic({0, 1});
        check_one("alt_smb", smb_estimate(alt, word, p));
        check_one("alt_rokhlin", rokhlin_estimate(alt, word, p));
    }
    report(3, "entropy triangulation against log sqrt(6) = 0.895880", pass,
           detail + fmt("; all within 2 se of %.6f", kLogSqrt6));
}

void criterion4_gauss_renyi_agreement() {
    FiberedMapFamily<Rational> gr(SystemDescriptor::gauss_renyi());
    const BaseProcess bern = BaseProcess::bernoulli({0, 1}, {mpq_class(1, 2), mpq_class(1, 2)});
    EstimatorParams p;
    p.n = 5000;
    p.trials = 200;
    p.precision_digits = 10000;
    p.threads = worker_threads();
    p.seed = kSeed + 3;
    const auto smb = smb_estimate(gr, bern, p);
    p.seed = kSeed + 4;  // independent samples
    const auto rok = rokhlin_estimate(gr, bern, p);
    const double diff = std::abs(smb.value - rok.value);
    const double budget = 2.0 * (smb.stderr_ + rok.stderr_);
    const bool pass = diff <= budget;
    report(4, "Gauss-Renyi cross-agreement of cylinder decay and log-derivative", pass,
           fmt("smb=%.5f(se %.5f, excl %ld) rokhlin=%.5f(se %.5f, excl %ld), |diff|=%.5f <= %.5f",
               smb.value, smb.stderr_, smb.excluded, rok.value, rok.stderr_, rok.excluded, diff,
               budget));
}

void criterion5_clt_property() {
    FiberedMapFamily<Rational> t23(SystemDescriptor::integer_base({2, 3}));
    const double sigma = 0.202733;  // sqrt(var(log base)) for p = (1/2,1/2)
    EstimatorParams p;
    p.n = 2000;
    p.trials = 2000;
    p.seed = kSeed + 5;
    p.precision_digits = 16;
    p.threads = worker_threads();
    const auto rep = clt_property_check(t23, kBern23, sigma, p);
    const bool pass = rep.ks < 0.05;
    report(5, "CLT property of cylinder log-measures, mixed bases {2,3}", pass,
           fmt("KS = %.4f < 0.05, excluded %ld", rep.ks, rep.excluded));
}

void criterion6_lochs_clt() {
    FiberedMapFamily<Rational> t23(SystemDescriptor::integer_base({2, 3}));
    FiberedMapFamily<Rational> dec(SystemDescriptor::integer_base({10}));
    const double sigma = 0.202733;
    EstimatorParams p;
    p.n = 2000;
    p.trials = 1000;
    p.seed = kSeed + 6;
    p.precision_digits = 2000;
    p.threads = worker_threads();
    const auto rep = lochs_clt_check(t23, kBern23, dec, sigma, p);
    const bool pass = rep.ks < 0.08;
    report(6, "CLT of the comparison series m(n) against decimal expansions", pass,
           fmt("KS = %.4f vs < 0.08 at n=2000 (kappa=%.6f, mean ratio %.6f)", rep.ks, rep.kappa,
               rep.mean_ratio));
    if (!pass) {
        // The m-statistic carries an inherent O(1) fit deficit (an interval of
        // length l fits a level-m decimal cell only with probability
        // 1 - l*10^m, costing ~0.93 digits = ~0.24 sigma at this n) plus
        // integer lattice rounding; both decay like 1/sqrt(n) and the same
        // check passes near n = 8000.
        double mean = 0;
        for (double z : rep.z) mean += z;
        mean /= static_cast<double>(rep.z.size());
        double var = 0;
        for (double z : rep.z) var += (z - mean) * (z - mean);
        var /= static_cast<double>(rep.z.size() - 1);
        std::printf("INFO  criterion 6 diagnostic: mean_z = %.3f, sd_z = %.3f at n=2000\n", mean,
                    std::sqrt(var));
    }
}

void criterion7_zero_property() {
    bool pass = true;
    std::string detail;
    for (long m : {2L, 3L, 10L, 47L}) {
        FiberedMapFamily<Rational> sys(SystemDescriptor::integer_base({m}));
        const double h = *closed_form_entropy(sys.descriptor(), BaseProcess::singleton(m));
        const Rational x{sample_point(kSeed + 7, static_cast<std::uint64_t>(m), 24)};
        const auto series = zero_property_series(sys, x, 10000, h);
        bool all_zero = series.size() == 10000;
        for (double s : series) all_zero = all_zero && s == 0.0;
        pass = pass && all_zero;
        detail += fmt("%sM=%ld:%s", detail.empty() ? "" : ", ", m, all_zero ? "0" : "NONZERO");
    }
    report(7, "zero-property series bit-exactly vanishes for M-ary maps, n <= 10^4", pass,
           detail);
}

void criterion8_oracle_equivalence() {
    CounterRng rng = CounterRng::substream(kSeed + 8, 99, 0);
    bool pass = true;
    std::string detail;

    struct Case {
        const char* name;
        SystemDescriptor desc;
        long level;
    };
    std::vector<Case> cases;
    cases.push_back({"bases23", SystemDescriptor::integer_base({2, 3}), 8});
    cases.push_back({"decimal", SystemDescriptor::integer_base({10}), 6});
    cases.push_back(
        {"gls", SystemDescriptor::gls({mpq_class(1, 4), mpq_class(3, 4)}, {+1, -1}), 8});
    cases.push_back({"beta52", SystemDescriptor::beta(BetaSpec::exact_value(mpq_class(5, 2))), 8});
    cases.push_back({"alt32",
                     SystemDescriptor::beta_family(
                         {BetaSpec::exact_value(3), BetaSpec::exact_value(2)}),
                     8});

    for (const auto& c : cases) {
        FiberedMapFamily<Rational> sys(c.desc);
        const auto syms = sys.symbols();
        std::vector<long long> omega;
        for (long i = 0; i < c.level; ++i) omega.push_back(syms[rng.next_below(syms.size())]);
        const auto table = enumerate_cylinders<Rational>(sys, omega, c.level);
        const auto partition = check_partition(sys, table);
        long matched = 0, checked = 0;
        for (int it = 0; it < 200; ++it) {
            const Rational x{sample_point(kSeed + 9, static_cast<std::uint64_t>(it), 40)};
            CylinderTracker<Rational> trk(sys, x);
            for (long long sym : omega) {
                if (trk.status() != TrackerStatus::Active) break;
                trk.step(sym);
            }
            if (trk.status() != TrackerStatus::Active || trk.n() != c.level) continue;
            ++checked;
            for (const auto& row : table.rows) {
                if (contains_point(row.interval, x) != Tri::True) continue;
                const auto& cyl = trk.cylinder();
                if (row.word == trk.digits() && row.interval.lo == cyl.lo &&
                    row.interval.hi == cyl.hi && row.interval.lo_open == cyl.lo_open &&
                    row.interval.hi_open == cyl.hi_open)
                    ++matched;
                break;
            }
        }
        const bool ok = partition.disjoint && partition.total_is_one && matched == checked &&
                        checked > 150;
        pass = pass && ok;
        detail += fmt("%s%s:%ld/%ld%s", detail.empty() ? "" : ", ", c.name, matched, checked,
                      partition.total_is_one ? "" : " MASS!=1");
    }

    // capped countable family: mass is exactly 1 minus the reported residual
    {
        FiberedMapFamily<Rational> gauss(SystemDescriptor::gauss());
        const std::vector<long long> w{0};
        const auto table = enumerate_cylinders<Rational>(gauss, w, 1, 30);
        const auto partition = check_partition(gauss, table);
        const bool ok =
            partition.disjoint && partition.residual == Rational(1, 32) && !partition.total_is_one;
        pass = pass && ok;
        detail += fmt(", gauss_residual:%s", ok ? "1/32" : "WRONG");
    }

    // comparison series against exhaustive containment
    {
        FiberedMapFamily<Rational> t23(SystemDescriptor::integer_base({2, 3}));
        FiberedMapFamily<Rational> dec(SystemDescriptor::integer_base({10}));
        long ok_m = 0, tot_m = 0;
        for (int it = 0; it < 200; ++it) {
            std::vector<long long> wt;
            for (int i = 0; i < 6; ++i) wt.push_back(rng.next_below(2) == 0 ? 2 : 3);
            const std::vector<long long> ws(20, 10);
            const Rational x{sample_point(kSeed + 10, static_cast<std::uint64_t>(it), 40)};
            const auto table = enumerate_cylinders<Rational>(t23, wt, 6);
            const auto series = lochs_series<Rational>(t23, wt, dec, ws, x, 6);
            const long bf = brute_force_m<Rational>(table, dec, ws, x, 18);
            ++tot_m;
            if (series.m.back() == bf) ++ok_m;
        }
        pass = pass && ok_m == tot_m;
        detail += fmt(", lochs_m:%ld/%ld", ok_m, tot_m);
    }
    report(8, "oracle equivalence at small depth", pass, detail);
}

void criterion9_backend_soundness() {
    CounterRng rng = CounterRng::substream(kSeed + 11, 98, 0);
    std::vector<SystemDescriptor> descs;
    descs.push_back(SystemDescriptor::integer_base({2, 3}));
    descs.push_back(SystemDescriptor::gauss_renyi());
    descs.push_back(SystemDescriptor::beta(BetaSpec::exact_value(mpq_class(5, 2))));
    descs.push_back(SystemDescriptor::gls({mpq_class(1, 3), mpq_class(2, 3)}, {+1, -1}));

    long enclosed_bad = 0, contradiction = 0, trajectories = 0, containment_pairs = 0;
    for (int traj = 0; traj < 1000; ++traj) {
        const auto& desc = descs[static_cast<std::size_t>(traj) % descs.size()];
        FiberedMapFamily<Rational> sys_q(desc);
        FiberedMapFamily<Enclosure> sys_f(desc);
        const mpq_class xq = sample_point(kSeed + 12, static_cast<std::uint64_t>(traj), 30);
        CylinderTracker<Rational> tq(sys_q, Rational{xq});
        CylinderTracker<Enclosure> tf(sys_f, Enclosure::from_mpq(xq));
        // a fixed reference interval provides containment queries on both sides
        const Interval<Rational> ref_q(Rational(1, 4), Rational(5, 8), false, true);
        const Interval<Enclosure> ref_f(Enclosure::from_mpq(mpq_class(1, 4)),
                                        Enclosure::from_mpq(mpq_class(5, 8)), false, true);
        const auto syms = sys_q.symbols();
        ++trajectories;
        for (int k = 0; k < 40; ++k) {
            const long long sym = syms[rng.next_below(syms.size())];
            if (tq.status() != TrackerStatus::Active) break;
            tq.step(sym);
            if (tf.status() == TrackerStatus::Active) tf.step(sym);
            if (tf.status() != TrackerStatus::Active) break;
            if (tq.status() != TrackerStatus::Active) break;
            if (tf.digits() != tq.digits()) {
                ++contradiction;
                break;
            }
            const auto& cq = tq.cylinder();
            const auto& cf = tf.cylinder();
            // the enclosure hull must contain the exact cylinder
            const bool lo_ok = mpq_class(cf.lo.lo()) <= cq.lo.value();
            const bool hi_ok = cq.hi.value() <= mpq_class(cf.hi.hi());
            if (!lo_ok || !hi_ok) ++enclosed_bad;
            // containment answers must never contradict the exact ones
            const Tri exact1 = contains(ref_q, cq), approx1 = contains(ref_f, cf);
            const Tri exact2 = contains(cq, ref_q), approx2 = contains(cf, ref_f);
            ++containment_pairs;
            if ((approx1 != Tri::Unknown && approx1 != exact1) ||
                (approx2 != Tri::Unknown && approx2 != exact2))
                ++contradiction;
        }
    }
    const bool pass = enclosed_bad == 0 && contradiction == 0;
    report(9, "float enclosures stay sound against the exact backend", pass,
           fmt("%ld trajectories, %ld containment pairs, %ld enclosure violations, %ld "
               "contradictions",
               trajectories, containment_pairs, enclosed_bad, contradiction));
}

}  // namespace

int main() {
    std::printf("acceptance suite (seed %" PRIu64 ", %u threads)\n", kSeed, worker_threads());
    criterion1_lochs_constant();
    criterion2_random_lochs_ratio();
    criterion3_entropy_triangulation();
    criterion4_gauss_renyi_agreement();
    criterion5_clt_property();
    criterion6_lochs_clt();
    criterion7_zero_property();
    criterion8_oracle_equivalence();
    criterion9_backend_soundness();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 4;
}
