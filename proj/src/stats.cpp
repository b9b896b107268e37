#include "negcall/stats.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "negcall/analytics.hpp"

namespace negcall {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("significance level must lie in (0, 0.5)");
}

Verdict verdict_from_abs_z(double z, double critical) {
    return std::fabs(z) <= critical ? Verdict::pass : Verdict::fail;
}

double binom_log_pmf(std::size_t k, std::size_t n, double p) {
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) +
           kk * std::log(p) + (nn - kk) * std::log1p(-p);
}

/// P(X <= k) for X ~ Binomial(n, p), by direct summation.
double binom_cdf(std::size_t k, std::size_t n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return k >= n ? 1.0 : 0.0;
    KahanSum s;
    for (std::size_t i = 0; i <= k; ++i) s.add(std::exp(binom_log_pmf(i, n, p)));
    return std::min(1.0, s.value());
}

}  // namespace

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass:
            return "pass";
        case Verdict::fail:
            return "fail";
        default:
            return "inconclusive";
    }
}

nlohmann::json to_json(const TestReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["estimate"] = r.estimate;
    j["stderr"] = r.std_error;
    j["oracle"] = r.oracle ? nlohmann::json(*r.oracle) : nlohmann::json(nullptr);
    j["z"] = std::isfinite(r.z) ? nlohmann::json(r.z)
                                : nlohmann::json(r.z > 0 ? "+inf" : "-inf");
    j["alpha"] = r.alpha;
    j["n"] = r.n;
    j["verdict"] = verdict_name(r.verdict);
    return j;
}

TestReport mean_test_summary(double mean, double std_error, std::size_t n, double oracle,
                             double alpha, std::string name) {
    check_alpha(alpha);
    if (n < 2) throw std::invalid_argument("mean test: need n >= 2");
    TestReport r;
    r.name = std::move(name);
    r.estimate = mean;
    r.std_error = std_error;
    r.oracle = oracle;
    r.alpha = alpha;
    r.n = n;
    if (std_error == 0.0) {
        r.z = (mean == oracle) ? 0.0 : (mean > oracle ? kInf : -kInf);
        r.verdict = (mean == oracle) ? Verdict::pass : Verdict::fail;
        return r;
    }
    r.z = (mean - oracle) / std_error;
    r.verdict = verdict_from_abs_z(r.z, z_two_sided(alpha));
    return r;
}

TestReport mean_test(std::span<const double> samples, double oracle, double alpha,
                     std::string name) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("mean test: need n >= 2");
    KahanSum sum;
    for (double x : samples) sum.add(x);
    const double mean = sum.value() / static_cast<double>(n);
    KahanSum sq;
    for (double x : samples) sq.add((x - mean) * (x - mean));
    const double var = sq.value() / static_cast<double>(n - 1);
    return mean_test_summary(mean, std::sqrt(var / static_cast<double>(n)), n, oracle, alpha,
                             std::move(name));
}

TestReport binomial_tail_test(std::size_t hits, std::size_t n, double oracle_p, double alpha,
                              std::string name) {
    check_alpha(alpha);
    if (n < 1) throw std::invalid_argument("binomial test: need n >= 1");
    if (hits > n) throw std::invalid_argument("binomial test: hits exceed n");
    if (!(oracle_p >= 0.0 && oracle_p <= 1.0))
        throw std::invalid_argument("binomial test: oracle probability outside [0,1]");

    TestReport r;
    r.name = std::move(name);
    const double nn = static_cast<double>(n);
    const double p_hat = static_cast<double>(hits) / nn;
    r.estimate = p_hat;
    r.std_error = std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / nn);
    r.oracle = oracle_p;
    r.alpha = alpha;
    r.n = n;

    const double sigma = std::sqrt(nn * oracle_p * (1.0 - oracle_p));
    const double diff = static_cast<double>(hits) - nn * oracle_p;
    if (sigma > 0.0) {
        const double shrunk = std::max(0.0, std::fabs(diff) - 0.5);  // continuity correction
        r.z = (diff >= 0.0 ? shrunk : -shrunk) / sigma;
    } else {
        r.z = (diff == 0.0) ? 0.0 : (diff > 0.0 ? kInf : -kInf);
    }

    if (nn * oracle_p < 10.0 || sigma == 0.0) {
        // Exact two-sided tail probability.
        const double lo = binom_cdf(hits, n, oracle_p);
        const double hi = hits == 0 ? 1.0 : 1.0 - binom_cdf(hits - 1, n, oracle_p);
        const double pval = std::min(1.0, 2.0 * std::min(lo, hi));
        r.verdict = (pval >= alpha) ? Verdict::pass : Verdict::fail;
        return r;
    }
    r.verdict = verdict_from_abs_z(r.z, z_two_sided(alpha));
    return r;
}

TestReport monotone_means_test(std::span<const double> means, std::span<const double> std_errors,
                               double alpha, std::string name) {
    check_alpha(alpha);
    if (means.size() != std_errors.size())
        throw std::invalid_argument("monotone means test: size mismatch");
    const std::size_t k = means.size();
    if (k < 2) throw std::invalid_argument("monotone means test: need >= 2 nodes");

    const std::size_t n_pairs = k * (k - 1) / 2;
    const double critical = z_one_sided(alpha / static_cast<double>(n_pairs));

    TestReport r;
    r.name = std::move(name);
    r.alpha = alpha;
    r.n = k;
    double worst_z = kInf;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double diff = means[j] - means[i];
            const double se =
                std::sqrt(std_errors[i] * std_errors[i] + std_errors[j] * std_errors[j]);
            double z;
            if (se == 0.0)
                z = (diff == 0.0) ? 0.0 : (diff > 0.0 ? kInf : -kInf);
            else
                z = diff / se;
            if (z < worst_z) {
                worst_z = z;
                r.estimate = diff;
                r.std_error = se;
            }
        }
    }
    r.z = worst_z;
    r.verdict = (worst_z >= -critical) ? Verdict::pass : Verdict::fail;
    return r;
}

SlopeFit loglog_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("loglog_slope: size mismatch");
    const std::size_t m = xs.size();
    if (m < 3) throw std::invalid_argument("loglog_slope: need >= 3 points");
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("loglog_slope: inputs must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    KahanSum sx, sy;
    for (std::size_t i = 0; i < m; ++i) {
        sx.add(lx[i]);
        sy.add(ly[i]);
    }
    const double mx = sx.value() / static_cast<double>(m);
    const double my = sy.value() / static_cast<double>(m);
    KahanSum sxx, sxy;
    for (std::size_t i = 0; i < m; ++i) {
        sxx.add((lx[i] - mx) * (lx[i] - mx));
        sxy.add((lx[i] - mx) * (ly[i] - my));
    }
    if (sxx.value() == 0.0) throw std::invalid_argument("loglog_slope: degenerate x values");

    SlopeFit fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    KahanSum ss_res;
    for (std::size_t i = 0; i < m; ++i) {
        const double resid = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res.add(resid * resid);
    }
    const double var = std::max(0.0, ss_res.value()) / static_cast<double>(m - 2);
    fit.std_error = std::sqrt(var / sxx.value());
    return fit;
}

double z_two_sided(double alpha) {
    check_alpha(alpha);
    return normal_quantile(1.0 - 0.5 * alpha);
}

double z_one_sided(double alpha) {
    check_alpha(alpha);
    return normal_quantile(1.0 - alpha);
}

double wilson_lower_bound(std::size_t hits, std::size_t n, double alpha) {
    if (n < 1) throw std::invalid_argument("wilson bound: need n >= 1");
    if (hits > n) throw std::invalid_argument("wilson bound: hits exceed n");
    const double z = z_one_sided(alpha);
    const double nn = static_cast<double>(n);
    const double p_hat = static_cast<double>(hits) / nn;
    const double z2n = z * z / nn;
    const double center = p_hat + 0.5 * z2n;
    const double radius = z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z * z / (4.0 * nn * nn));
    const double lb = (center - radius) / (1.0 + z2n);
    return std::max(0.0, lb);
}

}  // namespace negcall
