#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "negcall/pathgen.hpp"

namespace negcall {

/// A nonnegative claim with a self-consistent pricing rule: price(1, s) must
/// equal payoff(s) bitwise (the terminal identity of the market construction
/// inherits exactness from this). delta is the hedge ratio; it may be absent
/// for claims nobody hedges.
struct Claim {
    std::string label;
    std::function<double(double t, double s)> price;
    std::function<double(double s)> payoff;
    std::function<double(double t, double s)> delta;
};

/// Registry of built-in claims: "atm_call" (the default market), "digital_call"
/// (exercises the swap-in-any-nonnegative-martingale generalization), and
/// "unit_bond" (constant claim; degenerate hedging case). Throws
/// std::invalid_argument for unknown labels.
const Claim& builtin_claim(std::string_view label);
std::vector<std::string> claim_labels();

/// Vanilla call with arbitrary positive strike under unit volatility and zero
/// rate; "atm_call" is the strike-1 instance.
Claim make_call_claim(const struct ClaimParams& params);

/// One simulated market scenario: the primary asset s1, the claim's running
/// replication value c, the stopped singular integral m, and the derived
/// second asset s2 = c + (m - a), where a = claim price at (0,1) plus one.
struct MarketPath {
    const TimeGrid* grid = nullptr;
    const Claim* claim = nullptr;
    std::vector<double> s1;  ///< primary asset, > 0 everywhere
    std::vector<double> c;   ///< replication value, >= 0 everywhere
    std::vector<double> m;   ///< stopped integral, clamped to a once it hits
    std::vector<double> s2;  ///< the negatively-priced asset; s2[0] = -1
    std::optional<std::size_t> stop_index;  ///< first node with m = a
    bool stopped = false;
    double d = 0.0;  ///< terminal payoff
    double a = 0.0;  ///< hitting level = claim.price(0,1) + 1
};

/// Runs one market scenario on a Brownian path. The primary asset uses the
/// exact per-step lognormal update; the integral uses the left-endpoint
/// Euler-Ito scheme on the same increments, clamped to a at the first
/// crossing. With bridge_correction on, a between-node crossing is declared
/// with probability exp(-2(a-m_k)(a-m_{k+1})/dtau_k) when both endpoints sit
/// below a. Throws std::invalid_argument when the path does not match the
/// grid or the claim is incomplete.
MarketPath simulate_market_path(const BrownianPath& bp, const TimeGrid& grid, const Claim& claim,
                                bool bridge_correction = true);

/// Exact-law draw of the integral's summary functionals: hitting time (in
/// qv-time), pre-hit minimum, and the almost-sure terminal value a. No
/// discretization error; not jointly coupled with the primary asset.
struct ExactDraw {
    double hit_time = 0.0;
    double pre_hit_min = 0.0;
    double terminal_m = 0.0;
};

ExactDraw simulate_terminal_exact(double a, std::uint64_t seed, std::uint64_t path_id);

/// Independent terminal draw of the claim's payoff under the exact lognormal
/// terminal law of the primary asset.
double sample_terminal_payoff(const Claim& claim, std::uint64_t seed, std::uint64_t path_id);

/// Per-node sample means with standard errors for the three simulated series.
struct NodeMeans {
    std::size_t n = 0;
    std::vector<double> s1_mean, s1_se;
    std::vector<double> m_mean, m_se;
    std::vector<double> s2_mean, s2_se;
};

/// Streaming accumulator behind expected_means; merge order must be fixed by
/// the caller for bit-reproducible results (the chunked runner does this).
class NodeMeansAccumulator {
  public:
    NodeMeansAccumulator() = default;
    explicit NodeMeansAccumulator(std::size_t n_nodes);
    void add(const MarketPath& mp);
    void merge(const NodeMeansAccumulator& other);
    NodeMeans finalize() const;
    std::size_t n_nodes() const { return sum_s1_.size() / 2; }

  private:
    // Interleaved Neumaier partials: [2i] running sum, [2i+1] compensation.
    std::vector<double> sum_s1_, sum_s1_sq_;
    std::vector<double> sum_m_, sum_m_sq_;
    std::vector<double> sum_s2_, sum_s2_sq_;
    std::size_t n_ = 0;
};

/// Per-node means/standard errors over an ensemble sharing one grid. Throws
/// std::invalid_argument on an empty ensemble or mixed grids.
NodeMeans expected_means(std::span<const MarketPath> paths);

}  // namespace negcall
