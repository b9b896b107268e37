#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "negcall/stats.hpp"
#include "support/constants.hpp"

using namespace negcall;
namespace ts = negcall::testsupport;

TEST_CASE("compensated summation survives catastrophic cancellation") {
    KahanSum s;
    s.add(1e16);
    s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 1.0);  // a naive sum returns 0

    KahanSum a, b;
    a.add(1e16);
    b.add(1.0);
    b.add(-1e16);
    a.merge(b);
    CHECK(a.value() == 1.0);
}

TEST_CASE("verdict names") {
    CHECK(verdict_name(Verdict::pass) == "pass");
    CHECK(verdict_name(Verdict::fail) == "fail");
    CHECK(verdict_name(Verdict::inconclusive) == "inconclusive");
}

TEST_CASE("test report serialization") {
    TestReport r;
    r.name = "demo";
    r.estimate = 0.25;
    r.std_error = 0.01;
    r.z = 1.5;
    r.alpha = 0.05;
    r.n = 400;
    r.verdict = Verdict::pass;
    nlohmann::json j = to_json(r);
    CHECK(j["name"] == "demo");
    CHECK(j["estimate"] == 0.25);
    CHECK(j["stderr"] == 0.01);
    CHECK(j["oracle"].is_null());
    CHECK(j["z"] == 1.5);
    CHECK(j["n"] == 400);
    CHECK(j["verdict"] == "pass");

    r.oracle = 0.26;
    r.z = std::numeric_limits<double>::infinity();
    j = to_json(r);
    CHECK(j["oracle"] == 0.26);
    CHECK(j["z"] == "+inf");
    r.z = -r.z;
    CHECK(to_json(r)["z"] == "-inf");
}

TEST_CASE("mean test") {
    const std::vector<double> xs{1.0, 2.0, 3.0};
    const TestReport hit = mean_test(xs, 2.0, 0.05, "centered");
    CHECK(hit.estimate == 2.0);
    CHECK(hit.z == 0.0);
    CHECK(hit.verdict == Verdict::pass);
    CHECK(hit.n == 3);

    const TestReport miss = mean_test(xs, 10.0, 0.05, "far off");
    CHECK(miss.verdict == Verdict::fail);
    CHECK(miss.z < -10.0);

    // degenerate spread: pass only on exact equality
    const std::vector<double> flat{5.0, 5.0, 5.0, 5.0};
    const TestReport eq = mean_test(flat, 5.0, 0.05, "flat hit");
    CHECK(eq.verdict == Verdict::pass);
    CHECK(eq.z == 0.0);
    const TestReport ne = mean_test(flat, 4.0, 0.05, "flat miss");
    CHECK(ne.verdict == Verdict::fail);
    CHECK(std::isinf(ne.z));
    CHECK(ne.z > 0.0);

    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(mean_test(one, 0.0, 0.05, "too small"), std::invalid_argument);
    CHECK_THROWS_AS(mean_test(xs, 2.0, 0.5, "bad alpha"), std::invalid_argument);
    CHECK_THROWS_AS(mean_test(xs, 2.0, 0.0, "bad alpha"), std::invalid_argument);
}

TEST_CASE("summary-form mean test agrees with the sample form") {
    const std::vector<double> xs{0.4, 1.1, -0.3, 0.9, 0.2, 0.6};
    const TestReport full = mean_test(xs, 0.5, 0.01, "sample");
    KahanSum sum;
    for (double x : xs) sum.add(x);
    const double mean = sum.value() / 6.0;
    KahanSum sq;
    for (double x : xs) sq.add((x - mean) * (x - mean));
    const double se = std::sqrt(sq.value() / 5.0 / 6.0);
    const TestReport summary = mean_test_summary(mean, se, 6, 0.5, 0.01, "summary");
    CHECK(full.z == summary.z);
    CHECK(full.verdict == summary.verdict);
    CHECK(full.estimate == summary.estimate);
}

TEST_CASE("critical values") {
    CHECK(std::fabs(z_two_sided(ts::kAlphaThreeSigma) - 3.0) <= 1e-9);
    CHECK(std::fabs(z_two_sided(0.01) - ts::kZTwoSided001) <= 1e-12);
    CHECK(std::fabs(z_one_sided(0.05) - 1.6448536269514722) <= 1e-12);
    CHECK(z_one_sided(0.25) == doctest::Approx(ts::kZ075).epsilon(1e-12));
    CHECK_THROWS_AS(z_two_sided(0.5), std::invalid_argument);
    CHECK_THROWS_AS(z_one_sided(0.0), std::invalid_argument);
}

TEST_CASE("binomial tail test, normal regime") {
    // n * p0 = 5000 >> 10: continuity-corrected z against the oracle
    const TestReport close = binomial_tail_test(5100, 10000, 0.5, 0.01, "close");
    CHECK(std::fabs(close.z - 1.99) <= 1e-12);  // (100 - 0.5) / 50
    CHECK(close.verdict == Verdict::pass);
    CHECK(close.estimate == 0.51);
    REQUIRE(close.oracle.has_value());
    CHECK(*close.oracle == 0.5);

    const TestReport far = binomial_tail_test(5200, 10000, 0.5, 0.01, "far");
    CHECK(far.verdict == Verdict::fail);
    CHECK(far.z > 3.5);

    const TestReport below = binomial_tail_test(4800, 10000, 0.5, 0.01, "below");
    CHECK(below.z < 0.0);
}

TEST_CASE("binomial tail test, sparse regime uses exact tails") {
    // n * p0 = 5 < 10: the normal approximation is replaced by exact tails
    const TestReport typical = binomial_tail_test(5, 1000, 0.005, 0.01, "typical");
    CHECK(typical.verdict == Verdict::pass);
    const TestReport excess = binomial_tail_test(20, 1000, 0.005, 0.01, "excess");
    CHECK(excess.verdict == Verdict::fail);
    const TestReport none = binomial_tail_test(0, 1000, 0.005, 0.01, "none");
    CHECK(none.verdict == Verdict::pass);  // P(X = 0) ~ 0.0067, two-sided ~ 0.013

    // degenerate oracles
    CHECK(binomial_tail_test(0, 100, 0.0, 0.01, "never, none").verdict == Verdict::pass);
    CHECK(binomial_tail_test(3, 100, 0.0, 0.01, "never, some").verdict == Verdict::fail);
    CHECK(binomial_tail_test(100, 100, 1.0, 0.01, "always, all").verdict == Verdict::pass);
    CHECK(binomial_tail_test(97, 100, 1.0, 0.01, "always, missing").verdict == Verdict::fail);

    CHECK_THROWS_AS(binomial_tail_test(5, 4, 0.5, 0.01, "hits > n"), std::invalid_argument);
    CHECK_THROWS_AS(binomial_tail_test(0, 0, 0.5, 0.01, "empty"), std::invalid_argument);
    CHECK_THROWS_AS(binomial_tail_test(1, 10, 1.5, 0.01, "bad p"), std::invalid_argument);
}

TEST_CASE("monotone means test") {
    const std::vector<double> up{0.0, 0.5, 1.0, 1.5};
    const std::vector<double> se(4, 0.1);
    CHECK(monotone_means_test(up, se, 0.01, "rising").verdict == Verdict::pass);

    std::vector<double> dip{0.0, 0.5, -1.5, 1.5};  // drops 2.0 below an earlier mean
    const TestReport bad = monotone_means_test(dip, se, 0.01, "dipping");
    CHECK(bad.verdict == Verdict::fail);
    // the report carries the worst ordered pair: -1.5 vs 0.5
    CHECK(bad.estimate == doctest::Approx(-2.0));

    // flat with zero spread: z = 0 everywhere, passes
    const std::vector<double> flat(3, 1.0);
    const std::vector<double> zero(3, 0.0);
    CHECK(monotone_means_test(flat, zero, 0.01, "flat").verdict == Verdict::pass);
    // any decrease at zero spread is infinitely significant
    const std::vector<double> drop{1.0, 0.999, 1.0};
    CHECK(monotone_means_test(drop, zero, 0.01, "drop").verdict == Verdict::fail);

    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(monotone_means_test(one, {zero.data(), 1}, 0.01, "short"),
                    std::invalid_argument);
    CHECK_THROWS_AS(monotone_means_test(up, zero, 0.01, "ragged"), std::invalid_argument);
}

TEST_CASE("log-log slope recovers an exact power law") {
    const std::vector<double> xs{64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.7 / std::sqrt(x));
    const SlopeFit fit = loglog_slope(xs, ys);
    CHECK(std::fabs(fit.slope + 0.5) <= 1e-12);
    CHECK(std::fabs(fit.intercept - std::log(3.7)) <= 1e-12);
    CHECK(fit.std_error <= 1e-12);

    // a perturbed point shows up in the residual-based standard error
    ys[3] *= 1.2;
    const SlopeFit rough = loglog_slope(xs, ys);
    CHECK(rough.std_error > 1e-3);

    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(loglog_slope(two, two), std::invalid_argument);
    CHECK_THROWS_AS(loglog_slope(xs, {ys.data(), 3}), std::invalid_argument);
    const std::vector<double> with_zero{1.0, 0.0, 4.0};
    const std::vector<double> pos{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(loglog_slope(with_zero, pos), std::invalid_argument);
    CHECK_THROWS_AS(loglog_slope(pos, with_zero), std::invalid_argument);
    const std::vector<double> same{2.0, 2.0, 2.0};
    CHECK_THROWS_AS(loglog_slope(same, pos), std::invalid_argument);
}

TEST_CASE("wilson lower bound") {
    // zero hits can never certify a positive tail
    CHECK(wilson_lower_bound(0, 1000, 0.01) == 0.0);
    // a single hit already does
    CHECK(wilson_lower_bound(1, 500, 0.01) > 0.0);
    CHECK(wilson_lower_bound(1, 1000000, 0.01) > 0.0);

    // textbook anchor: Wilson 95% interval for 8 of 10 has lower end 0.4902
    CHECK(std::fabs(wilson_lower_bound(8, 10, 0.025) - 0.4902) <= 5e-4);

    // monotone in hits, bounded by the point estimate
    const double lo = wilson_lower_bound(5, 1000, 0.01);
    const double hi = wilson_lower_bound(50, 1000, 0.01);
    CHECK(lo < hi);
    CHECK(hi < 0.05);

    // tightens with sample size at fixed proportion
    CHECK(wilson_lower_bound(50, 100, 0.01) < wilson_lower_bound(500, 1000, 0.01));

    CHECK_THROWS_AS(wilson_lower_bound(0, 0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(wilson_lower_bound(11, 10, 0.01), std::invalid_argument);
}
