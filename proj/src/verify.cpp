#include "negcall/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "negcall/analytics.hpp"
#include "negcall/runner.hpp"
#include "negcall/strategies.hpp"

namespace negcall {
namespace {

// Initial value of the unit-strike call at (t, s) = (0, 1), i.e. 2*Phi(1/2)-1,
// pinned to 30 digits from an independent adaptive-quadrature evaluation; the
// test suite recomputes the quadrature and cross-checks this literal.
constexpr double kPinnedAtmValue = 0.382924922548026207275409221217;
// Coarse 7-digit anchors for the same quantities.
constexpr double kAnchorAtmValue = 0.3829249;
constexpr double kAnchorHitLevel = 1.3829249;
constexpr double kAnchorTol = 1e-6;

// Two-sided tail mass outside +-3 standard deviations; used as alpha so the
// z-test thresholds below are exactly 3.
constexpr double k3SigmaAlpha = 2.6997960632601890533e-3;

constexpr double kTightTol = 1e-12;
constexpr double kPathTol = 1e-9;

/// Report for a worst-case tolerance check; the rule lives in the name, so
/// the oracle field stays empty and the verdict is a plain comparison.
TestReport tolerance_report(std::string name, double worst, double tol, std::size_t n) {
    TestReport r;
    r.name = std::move(name);
    r.estimate = worst;
    r.n = n;
    r.verdict = (worst <= tol) ? Verdict::pass : Verdict::fail;
    return r;
}

std::string fmt_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool all_pass(const std::vector<TestReport>& reports) {
    for (const TestReport& r : reports)
        if (r.verdict != Verdict::pass) return false;
    return !reports.empty();
}

EnsembleStats::Moments make_moments(const KahanSum& sum, const KahanSum& sq, std::size_t n) {
    EnsembleStats::Moments m;
    m.n = n;
    if (n == 0) return m;
    m.mean = sum.value() / static_cast<double>(n);
    if (n >= 2) {
        const double nn = static_cast<double>(n);
        const double var = (sq.value() - nn * m.mean * m.mean) / (nn - 1.0);
        m.std_error = std::sqrt(std::max(0.0, var) / nn);
    }
    return m;
}

}  // namespace

EnsembleStats::EnsembleStats(const TimeGrid& grid, std::vector<std::size_t> probe_nodes)
    : probes_(std::move(probe_nodes)) {
    for (std::size_t k : probes_)
        if (k >= grid.n_nodes()) throw std::invalid_argument("probe node outside grid");
    const std::size_t np = probes_.size();
    s1_sum_.resize(np);
    s1_sq_.resize(np);
    m_sum_.resize(np);
    m_sq_.resize(np);
    s2_sum_.resize(np);
    s2_sq_.resize(np);
}

void EnsembleStats::add(const MarketPath& mp) {
    ++n_paths_;
    if (mp.stopped) ++n_stopped_;

    max_s2_init_err_ = std::max(max_s2_init_err_, std::fabs(mp.s2.front() + 1.0));
    const std::size_t n_nodes = mp.s2.size();
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double ident = std::fabs(mp.s2[k] - (mp.c[k] + (mp.m[k] - mp.a)));
        max_s2_identity_err_ = std::max(max_s2_identity_err_, ident);
    }
    if (mp.stopped)
        max_stopped_terminal_err_ =
            std::max(max_stopped_terminal_err_, std::fabs(mp.s2.back() - mp.d));

    const WealthPath box = wealth_box(mp);
    max_box_w0_ = std::max(max_box_w0_, std::fabs(box.w.front()));
    for (std::size_t k = 0; k < n_nodes; ++k)
        max_box_identity_err_ = std::max(max_box_identity_err_, std::fabs(box.w[k] - mp.m[k]));
    if (mp.stopped)
        max_box_terminal_err_ = std::max(max_box_terminal_err_, std::fabs(box.terminal - mp.a));

    const auto [w1, w2] = wealth_w1_w2(mp);
    max_w1w2_init_err_ =
        std::max({max_w1w2_init_err_, std::fabs(w1.w.front()), std::fabs(w2.w.front())});
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double gap = (w2.w[k] - w1.w[k]) - mp.m[k];
        max_w1w2_identity_err_ = std::max(max_w1w2_identity_err_, std::fabs(gap));
    }
    if (mp.stopped)
        max_w1w2_gap_err_ =
            std::max(max_w1w2_gap_err_, std::fabs((w2.terminal - w1.terminal) - mp.a));

    for (std::size_t i = 0; i < probes_.size(); ++i) {
        const std::size_t k = probes_[i];
        s1_sum_[i].add(mp.s1[k]);
        s1_sq_[i].add(mp.s1[k] * mp.s1[k]);
        m_sum_[i].add(mp.m[k]);
        m_sq_[i].add(mp.m[k] * mp.m[k]);
        s2_sum_[i].add(mp.s2[k]);
        s2_sq_[i].add(mp.s2[k] * mp.s2[k]);
    }
    const double s1t = mp.s1.back();
    s1t_sum_.add(s1t);
    s1t_sq_.add(s1t * s1t);
    d_sum_.add(mp.d);
    d_sq_.add(mp.d * mp.d);
    if (!mp.stopped) {
        const double mu = mp.m.back();
        mu_sum_.add(mu);
        mu_sq_.add(mu * mu);
    }
}

void EnsembleStats::merge(const EnsembleStats& other) {
    n_paths_ += other.n_paths_;
    n_stopped_ += other.n_stopped_;
    max_s2_init_err_ = std::max(max_s2_init_err_, other.max_s2_init_err_);
    max_s2_identity_err_ = std::max(max_s2_identity_err_, other.max_s2_identity_err_);
    max_stopped_terminal_err_ = std::max(max_stopped_terminal_err_, other.max_stopped_terminal_err_);
    max_box_w0_ = std::max(max_box_w0_, other.max_box_w0_);
    max_box_identity_err_ = std::max(max_box_identity_err_, other.max_box_identity_err_);
    max_box_terminal_err_ = std::max(max_box_terminal_err_, other.max_box_terminal_err_);
    max_w1w2_init_err_ = std::max(max_w1w2_init_err_, other.max_w1w2_init_err_);
    max_w1w2_identity_err_ = std::max(max_w1w2_identity_err_, other.max_w1w2_identity_err_);
    max_w1w2_gap_err_ = std::max(max_w1w2_gap_err_, other.max_w1w2_gap_err_);
    for (std::size_t i = 0; i < probes_.size(); ++i) {
        s1_sum_[i].merge(other.s1_sum_[i]);
        s1_sq_[i].merge(other.s1_sq_[i]);
        m_sum_[i].merge(other.m_sum_[i]);
        m_sq_[i].merge(other.m_sq_[i]);
        s2_sum_[i].merge(other.s2_sum_[i]);
        s2_sq_[i].merge(other.s2_sq_[i]);
    }
    s1t_sum_.merge(other.s1t_sum_);
    s1t_sq_.merge(other.s1t_sq_);
    d_sum_.merge(other.d_sum_);
    d_sq_.merge(other.d_sq_);
    mu_sum_.merge(other.mu_sum_);
    mu_sq_.merge(other.mu_sq_);
}

std::vector<double> EnsembleStats::fingerprint() const {
    std::vector<double> f{
        static_cast<double>(n_paths_),
        static_cast<double>(n_stopped_),
        max_s2_init_err_,
        max_s2_identity_err_,
        max_stopped_terminal_err_,
        max_box_w0_,
        max_box_identity_err_,
        max_box_terminal_err_,
        max_w1w2_init_err_,
        max_w1w2_identity_err_,
        max_w1w2_gap_err_,
    };
    for (std::size_t i = 0; i < probes_.size(); ++i) {
        f.push_back(s1_sum_[i].value());
        f.push_back(s1_sq_[i].value());
        f.push_back(m_sum_[i].value());
        f.push_back(m_sq_[i].value());
        f.push_back(s2_sum_[i].value());
        f.push_back(s2_sq_[i].value());
    }
    f.push_back(s1t_sum_.value());
    f.push_back(s1t_sq_.value());
    f.push_back(d_sum_.value());
    f.push_back(d_sq_.value());
    f.push_back(mu_sum_.value());
    f.push_back(mu_sq_.value());
    return f;
}

EnsembleStats::Moments EnsembleStats::probe_s1(std::size_t i) const {
    return make_moments(s1_sum_[i], s1_sq_[i], n_paths_);
}
EnsembleStats::Moments EnsembleStats::probe_m(std::size_t i) const {
    return make_moments(m_sum_[i], m_sq_[i], n_paths_);
}
EnsembleStats::Moments EnsembleStats::probe_s2(std::size_t i) const {
    return make_moments(s2_sum_[i], s2_sq_[i], n_paths_);
}
EnsembleStats::Moments EnsembleStats::terminal_s1() const {
    return make_moments(s1t_sum_, s1t_sq_, n_paths_);
}
EnsembleStats::Moments EnsembleStats::terminal_payoff() const {
    return make_moments(d_sum_, d_sq_, n_paths_);
}
EnsembleStats::Moments EnsembleStats::unstopped_m() const {
    return make_moments(mu_sum_, mu_sq_, n_unstopped());
}

std::vector<std::size_t> default_probe_nodes(const TimeGrid& grid) {
    std::vector<std::size_t> nodes;
    if (grid.n_nodes() < 3) return nodes;
    for (const double target : {0.25, 0.5, 0.75}) {
        std::size_t best = 1;
        double best_err = std::fabs(grid.t[1] - target);
        for (std::size_t k = 2; k + 1 < grid.n_nodes(); ++k) {
            const double err = std::fabs(grid.t[k] - target);
            if (err < best_err) {
                best_err = err;
                best = k;
            }
        }
        nodes.push_back(best);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

EnsembleStats run_market_ensemble(const ScenarioConfig& cfg, const Claim& claim) {
    const TimeGrid grid = make_grid(cfg.grid_spec());
    EnsembleStats proto(grid, default_probe_nodes(grid));
    return run_chunked<EnsembleStats>(
        cfg.n_paths, cfg.threads, proto, [&](EnsembleStats& acc, std::size_t p) {
            const BrownianPath bp = sample_brownian(grid, cfg.seed, p);
            acc.add(simulate_market_path(bp, grid, claim, cfg.bridge_correction));
        });
}

ExactStats::ExactStats(std::vector<double> levels)
    : levels_(std::move(levels)), hits_(levels_.size(), 0) {}

void ExactStats::add(const ExactDraw& draw, double payoff, double a) {
    ++n_;
    for (std::size_t i = 0; i < levels_.size(); ++i)
        if (draw.pre_hit_min < -levels_[i]) ++hits_[i];
    max_terminal_err_ = std::max(max_terminal_err_, std::fabs(draw.terminal_m - a));
    d_sum_.add(payoff);
    d_sq_.add(payoff * payoff);
}

void ExactStats::merge(const ExactStats& other) {
    n_ += other.n_;
    for (std::size_t i = 0; i < hits_.size(); ++i) hits_[i] += other.hits_[i];
    max_terminal_err_ = std::max(max_terminal_err_, other.max_terminal_err_);
    d_sum_.merge(other.d_sum_);
    d_sq_.merge(other.d_sq_);
}

std::vector<double> ExactStats::fingerprint() const {
    std::vector<double> f{static_cast<double>(n_), max_terminal_err_, d_sum_.value(),
                          d_sq_.value()};
    for (std::size_t h : hits_) f.push_back(static_cast<double>(h));
    return f;
}

EnsembleStats::Moments ExactStats::payoff_moments() const {
    return make_moments(d_sum_, d_sq_, n_);
}

ExactStats run_exact_ensemble(const ScenarioConfig& cfg, const Claim& claim) {
    const double a = claim.price(0.0, 1.0) + 1.0;
    ExactStats proto(cfg.ruin_levels);
    return run_chunked<ExactStats>(cfg.n_paths, cfg.threads, proto,
                                   [&](ExactStats& acc, std::size_t p) {
                                       const ExactDraw draw = simulate_terminal_exact(a, cfg.seed, p);
                                       acc.add(draw, sample_terminal_payoff(claim, cfg.seed, p), a);
                                   });
}

namespace {

/// Streaming second/fourth moments of the terminal hedging error.
struct HedgeErrAcc {
    KahanSum sq, quad;
    std::size_t n = 0;
    void add(double err) {
        const double e2 = err * err;
        sq.add(e2);
        quad.add(e2 * e2);
        ++n;
    }
    void merge(const HedgeErrAcc& o) {
        sq.merge(o.sq);
        quad.merge(o.quad);
        n += o.n;
    }
};

}  // namespace

ConvergeResult run_hedge_convergence(const ScenarioConfig& cfg, const Claim& claim) {
    if (!claim.delta) throw ConfigError("hedge study needs a claim with a hedge ratio");
    ConvergeResult out;
    for (const std::size_t n_steps : cfg.n_list) {
        GridSpec gs;
        gs.kind = GridKind::uniform_t;
        gs.n_steps = n_steps;
        const TimeGrid grid = make_grid(gs);
        const HedgeErrAcc acc = run_chunked<HedgeErrAcc>(
            cfg.converge_paths, cfg.threads, HedgeErrAcc{},
            [&](HedgeErrAcc& a, std::size_t p) {
                const BrownianPath bp = sample_brownian(grid, cfg.seed, p);
                const MarketPath mp = simulate_market_path(bp, grid, claim, cfg.bridge_correction);
                const WealthPath hedge = wealth_delta_hedge(mp);
                a.add(hedge.terminal - mp.d);
            });
        ConvergeRow row;
        row.n_steps = n_steps;
        const double nn = static_cast<double>(acc.n);
        const double msq = acc.sq.value() / nn;
        row.rms = std::sqrt(std::max(0.0, msq));
        if (acc.n >= 2 && row.rms > 0.0) {
            const double var_msq =
                std::max(0.0, (acc.quad.value() - nn * msq * msq) / (nn - 1.0));
            row.rms_se = std::sqrt(var_msq / nn) / (2.0 * row.rms);
        }
        out.rows.push_back(row);
    }

    std::vector<double> xs, ys;
    for (const ConvergeRow& row : out.rows)
        if (row.rms > 0.0) {
            xs.push_back(static_cast<double>(row.n_steps));
            ys.push_back(row.rms);
        }
    if (xs.size() >= 3) out.fit = loglog_slope(xs, ys);
    return out;
}

bool VerifySuiteResult::all_passed() const {
    for (const CriterionResult& c : criteria)
        if (c.applicable && !c.passed) return false;
    return true;
}

namespace {

/// Mean tests of the pinned interior structure: the integral stays centered
/// at zero and the derived asset at its opening price at every probe node.
void add_interior_mean_reports(std::vector<TestReport>& reports, const EnsembleStats& es,
                               const TimeGrid& grid, double alpha) {
    const auto& probes = es.probe_nodes();
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const std::string at = " at t=" + fmt_g(grid.t[probes[i]]);
        const auto m = es.probe_m(i);
        reports.push_back(
            mean_test_summary(m.mean, m.std_error, m.n, 0.0, alpha, "mean integral" + at));
        const auto s2 = es.probe_s2(i);
        reports.push_back(mean_test_summary(s2.mean, s2.std_error, s2.n, -1.0, alpha,
                                            "mean derived-asset price" + at));
    }
}

}  // namespace

VerifySuiteResult run_verify_suite(const ScenarioConfig& cfg, const VerifyOptions& opt) {
    cfg.validate();
    if (cfg.n_paths < 100)
        throw ConfigError("verification needs n_paths >= 100 for statistical verdicts");

    const Claim& claim = builtin_claim(cfg.claim);
    const Claim& atm = builtin_claim("atm_call");
    const Claim& digital = builtin_claim("digital_call");
    const double c0 = claim.price(0.0, 1.0);
    const double a = c0 + 1.0;

    const bool euler = cfg.backend != Backend::exact_law;
    const bool qv = cfg.backend == Backend::euler_qv;
    const std::string no_paths_note = "the exact-law backend simulates no discretized paths";

    TimeGrid grid;
    std::optional<EnsembleStats> es;
    if (euler) {
        grid = make_grid(cfg.grid_spec());
        es = run_market_ensemble(cfg, claim);
    }
    const ExactStats xs = run_exact_ensemble(cfg, claim);

    VerifySuiteResult out;
    auto push = [&out](int id, std::string name) -> CriterionResult& {
        CriterionResult c;
        c.id = id;
        c.name = std::move(name);
        out.criteria.push_back(std::move(c));
        return out.criteria.back();
    };

    {  // 1: the derived asset opens at -1 on every path
        CriterionResult& c = push(1, "derived asset opens at minus one on every path");
        if (!euler) {
            c.applicable = false;
            c.note = no_paths_note;
        } else {
            c.reports.push_back(tolerance_report("max |s2(0) + 1| over all paths (tol 1e-12)",
                                                 es->max_s2_init_err(), kTightTol, es->n_paths()));
            c.reports.push_back(
                tolerance_report("max nodewise |s2 - (c + m - a)| (tol 1e-12)",
                                 es->max_s2_identity_err(), kTightTol, es->n_paths()));
            c.passed = all_pass(c.reports);
        }
    }

    {  // 2: stopped paths deliver the claim payoff at the horizon
        CriterionResult& c = push(2, "stopped paths deliver the claim payoff at the horizon");
        if (!euler) {
            c.applicable = false;
            c.note = no_paths_note;
        } else if (es->n_stopped() == 0) {
            c.passed = false;
            c.note = "no stopped paths were sampled, so the identity is untested";
        } else {
            c.reports.push_back(tolerance_report(
                "max |terminal s2 - payoff| over stopped paths (tol 1e-9)",
                es->max_stopped_terminal_err(), kPathTol, es->n_stopped()));
            c.note = "stopped paths: " + std::to_string(es->n_stopped()) + " of " +
                     std::to_string(es->n_paths());
            c.passed = all_pass(c.reports);
        }
    }

    {  // 3: analytic anchors for the default market
        CriterionResult& c = push(3, "analytic anchors: initial call value and hitting level");
        const double atm_c0 = atm.price(0.0, 1.0);
        double pinned = kPinnedAtmValue;
        if (opt.corrupt_oracle) pinned += 1e-3;
        c.reports.push_back(tolerance_report(
            "|initial unit-strike call value - pinned quadrature value| (tol 1e-12)",
            std::fabs(atm_c0 - pinned), kTightTol, 1));
        c.reports.push_back(
            tolerance_report("|initial unit-strike call value - 0.3829249| (tol 1e-6)",
                             std::fabs(atm_c0 - kAnchorAtmValue), kAnchorTol, 1));
        c.reports.push_back(tolerance_report("|hitting level - 1.3829249| (tol 1e-6)",
                                             std::fabs((atm_c0 + 1.0) - kAnchorHitLevel),
                                             kAnchorTol, 1));
        c.passed = all_pass(c.reports);
    }

    {  // 4: survival fraction at the qv horizon
        CriterionResult& c = push(4, "survival fraction at the qv horizon matches the "
                                     "first-passage law");
        if (!qv) {
            c.applicable = false;
            c.note = euler ? "the calendar-uniform grid has no finite qv horizon" : no_paths_note;
        } else {
            const double p0 = hitting_tail(a, cfg.tau_max);
            c.reports.push_back(binomial_tail_test(
                es->n_unstopped(), es->n_paths(), p0, k3SigmaAlpha,
                "unstopped fraction at qv horizon " + fmt_g(cfg.tau_max) +
                    " vs first-passage tail"));
            c.passed = all_pass(c.reports);
        }
    }

    {  // 5: pinned means inside, exact terminal value, payoff-sized jump
        CriterionResult& c =
            push(5, "means pinned before the horizon; jump confined to the terminal date");
        if (euler) {
            add_interior_mean_reports(c.reports, es.value(), grid, cfg.alpha);
            const auto dm = es->terminal_payoff();
            c.reports.push_back(mean_test_summary(
                dm.mean, dm.std_error, dm.n, c0, k3SigmaAlpha,
                "mean simulated terminal payoff vs initial replication value"));
            if (qv && es->n_unstopped() >= 2) {
                const double q = hitting_tail(a, cfg.tau_max);
                const auto mu = es->unstopped_m();
                const double oracle = -a * (1.0 - q) / q;
                // the oracle itself carries survival-probability uncertainty;
                // fold it in by the delta method
                const double comp_se =
                    (a / (q * q)) * std::sqrt(q * (1.0 - q) / static_cast<double>(es->n_paths()));
                c.reports.push_back(mean_test_summary(
                    mu.mean, std::hypot(mu.std_error, comp_se), mu.n, oracle, k3SigmaAlpha,
                    "mean integral on surviving paths vs truncated-law value (combined se)"));
            }
        }
        c.reports.push_back(tolerance_report("max |exact terminal integral - a| (exact, tol 0)",
                                             xs.max_terminal_err(), 0.0, xs.n()));
        const auto pm = xs.payoff_moments();
        c.reports.push_back(
            mean_test_summary(pm.mean, pm.std_error, pm.n, c0, k3SigmaAlpha,
                              "mean exact-law terminal payoff vs initial replication value"));
        if (!euler) c.note = "interior mean tests need a discretized backend; skipped";
        c.passed = all_pass(c.reports);
    }

    {  // 6: ruin-law tails of the wealth minimum
        CriterionResult& c = push(6, "wealth-minimum tails match the ruin law at every depth");
        for (std::size_t i = 0; i < xs.levels().size(); ++i) {
            const double level = xs.levels()[i];
            c.reports.push_back(binomial_tail_test(
                xs.level_hits(i), xs.n(), ruin_tail(a, level), k3SigmaAlpha,
                "P(exact pre-hit minimum < -" + fmt_g(level) + ") vs a/(a+L)"));
        }
        c.passed = all_pass(c.reports);
    }

    {  // 7: box strategy
        CriterionResult& c =
            push(7, "box strategy starts at zero, tracks the integral, ends positive when stopped");
        if (!euler) {
            c.applicable = false;
            c.note = no_paths_note;
        } else {
            c.reports.push_back(tolerance_report("max |box wealth at 0| (exact, tol 0)",
                                                 es->max_box_w0(), 0.0, es->n_paths()));
            c.reports.push_back(tolerance_report("max nodewise |box wealth - integral| (tol 1e-9)",
                                                 es->max_box_identity_err(), kPathTol,
                                                 es->n_paths()));
            if (es->n_stopped() > 0)
                c.reports.push_back(tolerance_report(
                    "max |stopped terminal box wealth - a| (tol 1e-9), a > 0",
                    es->max_box_terminal_err(), kPathTol, es->n_stopped()));
            c.passed = all_pass(c.reports) && a > 0.0;
        }
    }

    {  // 8: short-asset vs short-replication wealth gap
        CriterionResult& c =
            push(8, "short-asset minus short-replication wealth gap reproduces the integral");
        if (!euler) {
            c.applicable = false;
            c.note = no_paths_note;
        } else {
            c.reports.push_back(tolerance_report("max |w1(0)| and |w2(0)| (exact, tol 0)",
                                                 es->max_w1w2_init_err(), 0.0, es->n_paths()));
            c.reports.push_back(
                tolerance_report("max nodewise |(w2 - w1) - integral| (tol 1e-9)",
                                 es->max_w1w2_identity_err(), kPathTol, es->n_paths()));
            if (es->n_stopped() > 0)
                c.reports.push_back(tolerance_report(
                    "max |stopped terminal (w2 - w1) - a| (tol 1e-9)", es->max_w1w2_gap_err(),
                    kPathTol, es->n_stopped()));
            c.passed = all_pass(c.reports);
        }
    }

    {  // 9: hedging error contraction rate
        CriterionResult& c = push(9, "discrete hedging error contracts at the square-root rate");
        const ConvergeResult conv = run_hedge_convergence(cfg, atm);
        std::string rms_note = "rms by steps:";
        for (const ConvergeRow& row : conv.rows)
            rms_note += " " + std::to_string(row.n_steps) + ":" + fmt_g(row.rms);
        c.note = rms_note;
        if (!conv.fit) {
            c.passed = false;
            c.note += "; no usable slope fit (need >= 3 rows with positive error)";
        } else {
            TestReport r;
            r.name = "log-log slope of terminal hedge error vs step count "
                     "(window [-0.65, -0.35])";
            r.estimate = conv.fit->slope;
            r.std_error = conv.fit->std_error;
            r.n = conv.rows.size();
            r.verdict = (conv.fit->slope >= -0.65 && conv.fit->slope <= -0.35) ? Verdict::pass
                                                                               : Verdict::fail;
            c.reports.push_back(r);
            c.passed = all_pass(c.reports);
        }
    }

    {  // 10: dominance detector
        CriterionResult& c = push(
            10, "negative-cost nonnegative payoff flags dominance; fair replication does not");
        const std::size_t n10 = std::min<std::size_t>(cfg.n_paths, 10000);
        std::vector<double> payoffs(n10);
        for (std::size_t i = 0; i < n10; ++i)
            payoffs[i] = sample_terminal_payoff(claim, cfg.seed, i);
        const std::vector<double> zeros(n10, 0.0);

        const DominanceVerdict hold = dominance_check(-1.0, payoffs, 0.0, zeros);
        TestReport r1;
        r1.name = "holding the derived asset at cost -1 dominates doing nothing";
        r1.estimate = hold.min_payoff_gap;
        r1.n = hold.n;
        r1.verdict = hold.violation ? Verdict::pass : Verdict::fail;
        c.reports.push_back(r1);

        const DominanceVerdict fair = dominance_check(c0, payoffs, 0.0, zeros);
        TestReport r2;
        r2.name = "replication at its fair cost is not flagged";
        r2.estimate = fair.cost_gap;
        r2.n = fair.n;
        r2.verdict = fair.violation ? Verdict::fail : Verdict::pass;
        c.reports.push_back(r2);
        c.passed = all_pass(c.reports);
    }

    {  // 11: primary-asset martingale sanity
        CriterionResult& c = push(11, "primary asset keeps unit mean at all probe dates");
        if (!euler) {
            c.applicable = false;
            c.note = no_paths_note;
        } else {
            const auto& probes = es->probe_nodes();
            for (std::size_t i = 0; i < probes.size(); ++i) {
                const auto s1 = es->probe_s1(i);
                c.reports.push_back(mean_test_summary(s1.mean, s1.std_error, s1.n, 1.0,
                                                      k3SigmaAlpha,
                                                      "mean primary asset at t=" +
                                                          fmt_g(grid.t[probes[i]])));
            }
            const auto s1t = es->terminal_s1();
            c.reports.push_back(mean_test_summary(s1t.mean, s1t.std_error, s1t.n, 1.0,
                                                  k3SigmaAlpha, "mean primary asset at t=1"));
            c.passed = all_pass(c.reports);
        }
    }

    {  // 12: swap in the digital claim
        CriterionResult& c =
            push(12, "digital claim swap preserves the opening, terminal, and mean structure");
        ScenarioConfig dcfg = cfg;
        dcfg.claim = "digital_call";
        const double dc0 = digital.price(0.0, 1.0);
        const double da = dc0 + 1.0;
        c.note = "hitting level recomputed: a = " + fmt_g(da);
        if (euler) {
            // identities and mean structure are resolution-independent; a
            // quarter-resolution grid keeps this criterion inside the time box
            dcfg.n_steps = std::min<std::size_t>(cfg.n_steps, 1024);
            const TimeGrid dgrid = make_grid(dcfg.grid_spec());
            const EnsembleStats ds = run_market_ensemble(dcfg, digital);
            c.reports.push_back(tolerance_report("max |s2(0) + 1| over all paths (tol 1e-12)",
                                                 ds.max_s2_init_err(), kTightTol, ds.n_paths()));
            if (ds.n_stopped() > 0)
                c.reports.push_back(tolerance_report(
                    "max |terminal s2 - payoff| over stopped paths (tol 1e-9)",
                    ds.max_stopped_terminal_err(), kPathTol, ds.n_stopped()));
            add_interior_mean_reports(c.reports, ds, dgrid, cfg.alpha);
        }
        const ExactStats dxs = run_exact_ensemble(dcfg, digital);
        c.reports.push_back(tolerance_report("max |exact terminal integral - a| (exact, tol 0)",
                                             dxs.max_terminal_err(), 0.0, dxs.n()));
        const auto pm = dxs.payoff_moments();
        c.reports.push_back(
            mean_test_summary(pm.mean, pm.std_error, pm.n, dc0, k3SigmaAlpha,
                              "mean exact-law digital payoff vs initial replication value"));
        if (!euler) c.note += "; discretized checks skipped on the exact-law backend";
        c.passed = all_pass(c.reports);
    }

    {  // 13: bit-reproducibility across thread counts
        CriterionResult& c = push(13, "statistics are bit-identical across thread counts");
        ScenarioConfig small = cfg;
        small.n_paths = std::min<std::size_t>(cfg.n_paths, 2000);
        small.n_steps = std::min<std::size_t>(cfg.n_steps, 256);

        std::vector<double> f1, f2;
        if (euler) {
            small.threads = 1;
            f1 = run_market_ensemble(small, claim).fingerprint();
            small.threads = 2;
            f2 = run_market_ensemble(small, claim).fingerprint();
        } else {
            small.threads = 1;
            f1 = run_exact_ensemble(small, claim).fingerprint();
            small.threads = 2;
            f2 = run_exact_ensemble(small, claim).fingerprint();
        }
        std::size_t mismatches = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < f1.size(); ++i) {
            if (f1[i] != f2[i]) ++mismatches;
            worst = std::max(worst, std::fabs(f1[i] - f2[i]));
        }
        TestReport r = tolerance_report(
            "max |1-thread stat - 2-thread stat| over all accumulated statistics (exact, tol 0)",
            worst, 0.0, small.n_paths);
        if (mismatches > 0) r.verdict = Verdict::fail;
        c.reports.push_back(r);
        c.note = std::to_string(f1.size()) + " statistics compared at " +
                 std::to_string(small.n_paths) + " paths";
        c.passed = all_pass(c.reports);
    }

    return out;
}

nlohmann::json verify_report_json(const ScenarioConfig& cfg, const VerifySuiteResult& result) {
    nlohmann::json doc;
    nlohmann::json jc;
    jc["claim"] = cfg.claim;
    jc["backend"] = backend_name(cfg.backend);
    jc["n_steps"] = cfg.n_steps;
    jc["tau_max"] = cfg.tau_max;
    jc["n_paths"] = cfg.n_paths;
    jc["seed"] = cfg.seed;
    jc["alpha"] = cfg.alpha;
    jc["ruin_levels"] = cfg.ruin_levels;
    jc["output_dir"] = cfg.output_dir;
    jc["format"] = format_name(cfg.format);
    jc["bridge_correction"] = cfg.bridge_correction;
    jc["threads"] = cfg.threads;
    jc["n_list"] = cfg.n_list;
    jc["converge_paths"] = cfg.converge_paths;
    doc["config"] = jc;

    nlohmann::json arr = nlohmann::json::array();
    for (const CriterionResult& c : result.criteria) {
        nlohmann::json e;
        e["id"] = c.id;
        e["name"] = c.name;
        e["applicable"] = c.applicable;
        e["passed"] = c.passed;
        e["note"] = c.note;
        nlohmann::json reps = nlohmann::json::array();
        for (const TestReport& r : c.reports) reps.push_back(to_json(r));
        e["reports"] = reps;
        arr.push_back(e);
    }
    doc["criteria"] = arr;
    doc["all_passed"] = result.all_passed();
    return doc;
}

}  // namespace negcall
