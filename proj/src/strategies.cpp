#include "negcall/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "negcall/analytics.hpp"

namespace negcall {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

WealthPath finish(std::vector<double> w) {
    WealthPath wp;
    wp.running_min.resize(w.size());
    double running = kInf;
    for (std::size_t i = 0; i < w.size(); ++i) {
        running = std::min(running, w[i]);
        wp.running_min[i] = running;
    }
    wp.terminal = w.back();
    wp.w = std::move(w);
    return wp;
}

void check_path(const MarketPath& mp) {
    if (mp.s1.empty() || mp.grid == nullptr)
        throw std::invalid_argument("strategy: uninitialized market path");
}

}  // namespace

WealthPath wealth_box(const MarketPath& mp) {
    check_path(mp);
    const double cash = mp.c[0] - mp.s2[0];
    std::vector<double> w(mp.s2.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = (mp.s2[k] - mp.c[k]) + cash;
    return finish(std::move(w));
}

WealthPath wealth_delta_hedge(const MarketPath& mp) {
    check_path(mp);
    if (mp.grid->kind != GridKind::uniform_t)
        throw std::invalid_argument("delta hedge: calendar-uniform grid required");
    if (!mp.claim || !mp.claim->delta)
        throw std::invalid_argument("delta hedge: claim exposes no hedge ratio");
    const std::size_t steps = mp.grid->n_steps();
    std::vector<double> w(steps + 1);
    w[0] = mp.c[0];
    for (std::size_t k = 0; k < steps; ++k) {
        const double pos = mp.claim->delta(mp.grid->t[k], mp.s1[k]);
        w[k + 1] = w[k] + pos * (mp.s1[k + 1] - mp.s1[k]);
    }
    return finish(std::move(w));
}

std::pair<WealthPath, WealthPath> wealth_w1_w2(const MarketPath& mp) {
    check_path(mp);
    const std::size_t n = mp.s2.size();
    std::vector<double> w1(n), w2(n);
    for (std::size_t k = 0; k < n; ++k) {
        w1[k] = mp.s2[0] - mp.s2[k];
        w2[k] = mp.c[0] - mp.c[k];
    }
    return {finish(std::move(w1)), finish(std::move(w2))};
}

WealthPath wealth_custom(const MarketPath& mp, double initial_wealth,
                         std::span<const double> pos_s1, std::span<const double> pos_s2) {
    check_path(mp);
    const std::size_t steps = mp.s1.size() - 1;
    if (pos_s1.size() != steps || pos_s2.size() != steps)
        throw std::invalid_argument("custom strategy: one position per step required");
    std::vector<double> w(steps + 1);
    w[0] = initial_wealth;
    for (std::size_t k = 0; k < steps; ++k)
        w[k + 1] = w[k] + pos_s1[k] * (mp.s1[k + 1] - mp.s1[k]) +
                   pos_s2[k] * (mp.s2[k + 1] - mp.s2[k]);
    return finish(std::move(w));
}

WealthPath make_wealth(const StrategySpec& spec, const MarketPath& mp) {
    switch (spec.kind) {
        case StrategyKind::box:
            return wealth_box(mp);
        case StrategyKind::delta_hedge:
            return wealth_delta_hedge(mp);
        case StrategyKind::sell_call:
            return wealth_w1_w2(mp).first;
        case StrategyKind::sell_replication:
            return wealth_w1_w2(mp).second;
        case StrategyKind::custom:
            return wealth_custom(mp, spec.initial_wealth, spec.pos_s1, spec.pos_s2);
    }
    throw std::invalid_argument("make_wealth: unknown strategy kind");
}

AdmissibilityVerdict classify_admissibility(std::span<const WealthPath> ensemble,
                                            AdmissibilityNotion notion, double alpha,
                                            std::vector<double> levels,
                                            std::optional<double> hitting_level) {
    if (ensemble.empty()) throw std::invalid_argument("classify_admissibility: empty ensemble");
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("classify_admissibility: alpha must lie in (0, 0.5)");
    if (notion == AdmissibilityNotion::numeraire_scaled)
        throw std::invalid_argument(
            "classify_admissibility: notion 'numeraire_scaled' is documented but not implemented");

    AdmissibilityVerdict verdict;
    verdict.notion = notion;
    const std::size_t n = ensemble.size();

    if (notion == AdmissibilityNotion::constant_bound) {
        if (levels.empty())
            throw std::invalid_argument("classify_admissibility: no depth levels given");
        const double deepest = *std::max_element(levels.begin(), levels.end());
        std::size_t hits = 0;
        for (const WealthPath& wp : ensemble)
            if (wp.running_min.back() < -deepest) ++hits;

        const double p_hat = static_cast<double>(hits) / static_cast<double>(n);
        verdict.uniform_lower_bound_rejected = wilson_lower_bound(hits, n, alpha) > 0.0;

        TestReport ev;
        ev.name = "path-minimum tail below -" + std::to_string(deepest);
        ev.estimate = p_hat;
        ev.std_error = std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
        ev.alpha = alpha;
        ev.n = n;
        ev.z = (ev.std_error > 0.0) ? p_hat / ev.std_error : (p_hat > 0.0 ? kInf : 0.0);
        ev.verdict = verdict.uniform_lower_bound_rejected ? Verdict::fail : Verdict::inconclusive;
        if (hitting_level) {
            // With the hitting level known, the tail has a closed-form oracle.
            ev.oracle = ruin_tail(*hitting_level, deepest);
            const TestReport cmp = binomial_tail_test(hits, n, *ev.oracle, alpha, ev.name);
            if (verdict.uniform_lower_bound_rejected && cmp.verdict == Verdict::pass)
                ev.verdict = Verdict::pass;
            ev.z = cmp.z;
        }
        verdict.evidence = ev;
        return verdict;
    }

    // supermartingale: pairwise mean comparisons at first / middle / last nodes.
    const std::size_t len = ensemble.front().w.size();
    for (const WealthPath& wp : ensemble)
        if (wp.w.size() != len)
            throw std::invalid_argument("classify_admissibility: ragged ensemble");
    std::vector<std::size_t> nodes{0};
    if (len > 2) nodes.push_back(len / 2);
    if (len > 1) nodes.push_back(len - 1);

    std::vector<double> means(nodes.size()), ses(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        KahanSum sum;
        for (const WealthPath& wp : ensemble) sum.add(wp.w[nodes[i]]);
        const double mean = sum.value() / static_cast<double>(n);
        KahanSum sq;
        for (const WealthPath& wp : ensemble)
            sq.add((wp.w[nodes[i]] - mean) * (wp.w[nodes[i]] - mean));
        const double var = n > 1 ? sq.value() / static_cast<double>(n - 1) : 0.0;
        means[i] = mean;
        ses[i] = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
        if (ses[i] == 0.0) verdict.degenerate_variance = true;
    }

    const std::size_t n_pairs = nodes.size() * (nodes.size() - 1) / 2;
    const double critical = z_one_sided(alpha / static_cast<double>(n_pairs));
    TestReport ev;
    ev.name = "pairwise mean increase over time";
    ev.alpha = alpha;
    ev.n = n;
    double best_z = -kInf;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const double diff = means[j] - means[i];
            const double se = std::sqrt(ses[i] * ses[i] + ses[j] * ses[j]);
            double z;
            if (se == 0.0)
                z = (diff == 0.0) ? 0.0 : (diff > 0.0 ? kInf : -kInf);
            else
                z = diff / se;
            if (z > best_z) {
                best_z = z;
                ev.estimate = diff;
                ev.std_error = se;
            }
        }
    }
    ev.z = best_z;
    verdict.supermartingale_rejected = best_z > critical;
    ev.verdict = verdict.supermartingale_rejected ? Verdict::fail : Verdict::inconclusive;
    verdict.evidence = ev;
    return verdict;
}

DominanceVerdict dominance_check(double cost_a, std::span<const double> terminal_a, double cost_b,
                                 std::span<const double> terminal_b) {
    if (terminal_a.size() != terminal_b.size())
        throw std::invalid_argument("dominance_check: sample length mismatch");
    if (terminal_a.empty()) throw std::invalid_argument("dominance_check: empty samples");
    DominanceVerdict v;
    v.n = terminal_a.size();
    v.cost_gap = cost_a - cost_b;
    double min_gap = kInf;
    for (std::size_t i = 0; i < terminal_a.size(); ++i)
        min_gap = std::min(min_gap, terminal_a[i] - terminal_b[i]);
    v.min_payoff_gap = min_gap;
    v.violation = (min_gap >= -1e-9) && (cost_a < cost_b);
    return v;
}

}  // namespace negcall
