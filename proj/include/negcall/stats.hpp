#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

namespace negcall {

/// Compensated (Neumaier) summation; merge() keeps results independent of
/// how partial sums were grouped, provided the merge order itself is fixed.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += (std::fabs(sum) >= std::fabs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    void merge(const KahanSum& o) {
        add(o.sum);
        comp += o.comp;
    }
    double value() const { return sum + comp; }
};

enum class Verdict { pass, fail, inconclusive };

std::string verdict_name(Verdict v);

/// One estimator-versus-oracle comparison. When an oracle is present, the
/// verdict is pass exactly when |estimate - oracle| <= z(alpha) * std_error;
/// tolerance-style checks leave the oracle empty and document their rule in
/// the name.
struct TestReport {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    std::optional<double> oracle;
    double z = 0.0;
    double alpha = 0.0;
    std::size_t n = 0;
    Verdict verdict = Verdict::inconclusive;
};

/// JSON form with keys {name, estimate, stderr, oracle, z, alpha, n, verdict}.
nlohmann::json to_json(const TestReport& r);

/// Two-sided z-test of the sample mean against an oracle. Degenerate variance
/// passes with z = 0 when the mean equals the oracle and fails with infinite
/// z otherwise. Requires n >= 2 and alpha in (0, 0.5).
TestReport mean_test(std::span<const double> samples, double oracle, double alpha,
                     std::string name);

/// Same test from already-accumulated summary statistics.
TestReport mean_test_summary(double mean, double std_error, std::size_t n, double oracle,
                             double alpha, std::string name);

/// Proportion test against oracle_p with continuity correction; switches to an
/// exact binomial tail probability when n * oracle_p < 10 (normal theory is
/// unreliable there).
TestReport binomial_tail_test(std::size_t hits, std::size_t n, double oracle_p, double alpha,
                              std::string name);

/// Rejects when any later mean falls below an earlier one by more than the
/// Bonferroni-corrected one-sided bound over all ordered node pairs. The
/// report carries the worst pair.
TestReport monotone_means_test(std::span<const double> means, std::span<const double> std_errors,
                               double alpha, std::string name);

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
};

/// Least-squares slope of log(y) on log(x) with its standard error. Requires
/// at least 3 strictly positive points.
SlopeFit loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// Two-sided / one-sided critical values for a significance level.
double z_two_sided(double alpha);
double z_one_sided(double alpha);

/// One-sided Wilson lower confidence bound for a binomial proportion; a
/// strictly positive bound rejects "this event never happens".
double wilson_lower_bound(std::size_t hits, std::size_t n, double alpha);

}  // namespace negcall
