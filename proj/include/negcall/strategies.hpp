#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "negcall/economy.hpp"
#include "negcall/stats.hpp"

namespace negcall {

enum class StrategyKind {
    box,               ///< long the derived asset, short the replication value, plus cash
    delta_hedge,       ///< dynamic replication of the claim in the primary asset
    sell_call,         ///< short the derived asset from zero initial wealth
    sell_replication,  ///< short the replication value from zero initial wealth
    custom,            ///< caller-supplied predictable positions
};

/// Description of a strategy; custom positions are per-step (position held
/// over step k must depend on information up to node k only).
struct StrategySpec {
    std::string label;
    StrategyKind kind = StrategyKind::box;
    double initial_wealth = 0.0;        ///< custom only
    std::vector<double> pos_s1;         ///< custom only, one entry per step
    std::vector<double> pos_s2;         ///< custom only, one entry per step
};

/// Self-financing wealth along one market scenario.
struct WealthPath {
    std::vector<double> w;
    std::vector<double> running_min;
    double terminal = 0.0;
};

/// Buy the derived asset, short the replication value, hold the difference of
/// their initial prices in cash: w = (s2 - c) + (c[0] - s2[0]). Starts at
/// exactly zero and coincides with the stopped integral m at every node.
WealthPath wealth_box(const MarketPath& mp);

/// Discrete replication: start at the claim's initial value and hold the
/// claim's hedge ratio in the primary asset over each step, rebalancing at
/// nodes. Requires a calendar-uniform grid (the hedge ratio is undefined at
/// t = 1, and qv-uniform grids collide with it) and a claim with a delta.
WealthPath wealth_delta_hedge(const MarketPath& mp);

/// The two short-side wealths from zero initial capital: first = short the
/// derived asset (w1 = s2[0] - s2), second = short the replication value
/// (w2 = c[0] - c). Their difference reproduces m at every node.
std::pair<WealthPath, WealthPath> wealth_w1_w2(const MarketPath& mp);

/// Wealth of caller-supplied per-step positions in (s1, s2), self-financed
/// from initial_wealth with a zero-rate cash account absorbing the rest.
WealthPath wealth_custom(const MarketPath& mp, double initial_wealth,
                         std::span<const double> pos_s1, std::span<const double> pos_s2);

/// Dispatch on a StrategySpec.
WealthPath make_wealth(const StrategySpec& spec, const MarketPath& mp);

enum class AdmissibilityNotion {
    constant_bound,   ///< wealth uniformly bounded below by a constant
    supermartingale,  ///< wealth means nonincreasing in time
    numeraire_scaled, ///< documented variant; not implemented
};

/// Statistical verdict on an admissibility notion. Rejections are at the
/// stated level; a non-rejection only ever means "consistent with", never a
/// proof. evidence.verdict semantics: fail = the notion is rejected on this
/// evidence; inconclusive = consistent with the notion; pass (only when an
/// oracle was supplied) = the observed tail also matches that oracle.
struct AdmissibilityVerdict {
    AdmissibilityNotion notion = AdmissibilityNotion::constant_bound;
    bool uniform_lower_bound_rejected = false;
    bool supermartingale_rejected = false;
    bool degenerate_variance = false;  ///< warning: a tested node had zero spread
    TestReport evidence;
};

/// constant_bound: examines P(path minimum < -L) at the deepest level in
/// `levels`; rejects a uniform lower bound when the one-sided Wilson bound at
/// level alpha is strictly positive. When `hitting_level` (the level a of the
/// stopped integral) is supplied, the evidence also compares the tail against
/// the a/(a+L) oracle. supermartingale: Bonferroni-corrected pairwise mean
/// comparisons on first/middle/last nodes; rejects when a later mean
/// significantly exceeds an earlier one. Throws on an empty ensemble or the
/// unimplemented notion.
AdmissibilityVerdict classify_admissibility(std::span<const WealthPath> ensemble,
                                            AdmissibilityNotion notion, double alpha,
                                            std::vector<double> levels = {1.0, 5.0, 10.0},
                                            std::optional<double> hitting_level = std::nullopt);

/// Result of a pairwise cost/payoff dominance comparison under a common path
/// coupling.
struct DominanceVerdict {
    bool violation = false;   ///< payoff of A dominates B's but A costs less
    double min_payoff_gap = 0.0;  ///< min over paths of terminal_a - terminal_b
    double cost_gap = 0.0;        ///< cost_a - cost_b
    std::size_t n = 0;
};

/// Flags a violation when terminal_a >= terminal_b on every sampled path
/// (within 1e-9) while cost_a < cost_b. Throws on length mismatch or empty
/// samples.
DominanceVerdict dominance_check(double cost_a, std::span<const double> terminal_a, double cost_b,
                                 std::span<const double> terminal_b);

}  // namespace negcall
