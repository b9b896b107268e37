#include "negcall/economy.hpp"

#include <cmath>
#include <stdexcept>

#include "negcall/analytics.hpp"
#include "negcall/rng.hpp"

namespace negcall {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double call_payoff(double s, double strike) {
    const double v = s - strike;
    return v > 0.0 ? v : 0.0;
}

double call_price(double t, double s, double strike) {
    if (!(s > 0.0)) throw std::invalid_argument("call price: spot must be > 0");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("call price: t must lie in [0,1]");
    const double rem = 1.0 - t;
    if (rem < 1e-12) return call_payoff(s, strike);
    const double sd = std::sqrt(rem);
    const double lm = std::log(s / strike);
    const double half = 0.5 * rem;
    const double p = s * normal_cdf((lm + half) / sd) - strike * normal_cdf((lm - half) / sd);
    return p > 0.0 ? p : 0.0;
}

double call_delta(double t, double s, double strike) {
    if (!(s > 0.0)) throw std::invalid_argument("call delta: spot must be > 0");
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("call delta: t must lie in [0,1)");
    const double rem = 1.0 - t;
    return normal_cdf((std::log(s / strike) + 0.5 * rem) / std::sqrt(rem));
}

double digital_payoff(double s) {
    if (s > 1.0) return 1.0;
    if (s < 1.0) return 0.0;
    return 0.5;  // the pricing formula's limit at the kink
}

double digital_price(double t, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("digital price: spot must be > 0");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("digital price: t must lie in [0,1]");
    const double rem = 1.0 - t;
    if (rem < 1e-12) return digital_payoff(s);
    return normal_cdf((std::log(s) - 0.5 * rem) / std::sqrt(rem));
}

double digital_delta(double t, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("digital delta: spot must be > 0");
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("digital delta: t must lie in [0,1)");
    const double rem = 1.0 - t;
    const double sd = std::sqrt(rem);
    return normal_pdf((std::log(s) - 0.5 * rem) / sd) / (s * sd);
}

}  // namespace

Claim make_call_claim(const ClaimParams& params) {
    params.validate();
    const double strike = params.strike;
    Claim claim;
    claim.label = (strike == 1.0) ? "atm_call" : ("call_k" + std::to_string(strike));
    claim.price = [strike](double t, double s) { return call_price(t, s, strike); };
    claim.payoff = [strike](double s) { return call_payoff(s, strike); };
    claim.delta = [strike](double t, double s) { return call_delta(t, s, strike); };
    return claim;
}

const Claim& builtin_claim(std::string_view label) {
    static const Claim atm = make_call_claim(ClaimParams{});
    static const Claim digital = [] {
        Claim c;
        c.label = "digital_call";
        c.price = digital_price;
        c.payoff = digital_payoff;
        c.delta = digital_delta;
        return c;
    }();
    static const Claim bond = [] {
        Claim c;
        c.label = "unit_bond";
        c.price = [](double, double) { return 1.0; };
        c.payoff = [](double) { return 1.0; };
        c.delta = [](double, double) { return 0.0; };
        return c;
    }();
    if (label == "atm_call") return atm;
    if (label == "digital_call") return digital;
    if (label == "unit_bond") return bond;
    throw std::invalid_argument("unknown claim label: " + std::string(label));
}

std::vector<std::string> claim_labels() { return {"atm_call", "digital_call", "unit_bond"}; }

MarketPath simulate_market_path(const BrownianPath& bp, const TimeGrid& grid, const Claim& claim,
                                bool bridge_correction) {
    const std::size_t steps = grid.n_steps();
    if (bp.increments.size() != steps)
        throw std::invalid_argument("simulate_market_path: path/grid length mismatch");
    if (!claim.price || !claim.payoff)
        throw std::invalid_argument("simulate_market_path: claim lacks price or payoff");

    MarketPath mp;
    mp.grid = &grid;
    mp.claim = &claim;
    const std::size_t nodes = grid.n_nodes();
    mp.s1.resize(nodes);
    mp.c.resize(nodes);
    mp.m.resize(nodes);
    mp.s2.resize(nodes);

    const double c0 = claim.price(0.0, 1.0);
    const double a = c0 + 1.0;
    mp.a = a;
    mp.s1[0] = 1.0;
    mp.c[0] = c0;
    mp.m[0] = 0.0;
    // Grouped as c + (m - a) at every node: at node 0 this is c0 - a = -1 up
    // to one rounding of a, and on stopped paths m - a vanishes exactly so
    // s2 collapses to c bitwise.
    mp.s2[0] = mp.c[0] + (mp.m[0] - a);

    const CounterRng bridge_rng(bp.seed, Stream::kBridge, bp.path_id);
    for (std::size_t k = 0; k < steps; ++k) {
        const double db = bp.increments[k];
        mp.s1[k + 1] = mp.s1[k] * std::exp(db - 0.5 * grid.dt[k]);

        if (mp.stopped || k >= grid.m_active_steps) {
            mp.m[k + 1] = mp.m[k];
        } else {
            const double m_next = mp.m[k] + grid.weight[k] * db;
            bool crossed = m_next >= a;
            if (!crossed && bridge_correction) {
                // Crossing probability of a Brownian bridge over the qv-step,
                // pinned at the two (sub-level) endpoint values.
                const double p = std::exp(-2.0 * (a - mp.m[k]) * (a - m_next) / grid.dtau[k]);
                crossed = bridge_rng.uniform(k, 0) < p;
            }
            if (crossed) {
                mp.m[k + 1] = a;
                mp.stopped = true;
                mp.stop_index = k + 1;
            } else {
                mp.m[k + 1] = m_next;
            }
        }
        mp.c[k + 1] = claim.price(grid.t[k + 1], mp.s1[k + 1]);
        mp.s2[k + 1] = mp.c[k + 1] + (mp.m[k + 1] - a);
    }
    mp.d = claim.payoff(mp.s1.back());
    return mp;
}

ExactDraw simulate_terminal_exact(double a, std::uint64_t seed, std::uint64_t path_id) {
    if (!(a > 0.0)) throw std::invalid_argument("simulate_terminal_exact: level must be > 0");
    ExactDraw draw;
    draw.hit_time = sample_hitting_time(a, seed, path_id);
    draw.pre_hit_min = sample_pre_hit_minimum(a, seed, path_id);
    draw.terminal_m = a;
    return draw;
}

double sample_terminal_payoff(const Claim& claim, std::uint64_t seed, std::uint64_t path_id) {
    const CounterRng rng(seed, Stream::kTerminal, path_id);
    const double z = rng.normal(0);
    return claim.payoff(std::exp(z - 0.5));
}

namespace {

// Neumaier update of an interleaved (sum, compensation) slot pair.
inline void comp_add(std::vector<double>& acc, std::size_t i, double x) {
    double& s = acc[2 * i];
    double& comp = acc[2 * i + 1];
    const double t = s + x;
    comp += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
    s = t;
}

inline double comp_value(const std::vector<double>& acc, std::size_t i) {
    return acc[2 * i] + acc[2 * i + 1];
}

void merge_comp(std::vector<double>& into, const std::vector<double>& from) {
    for (std::size_t i = 0; 2 * i < into.size(); ++i) {
        comp_add(into, i, from[2 * i]);
        into[2 * i + 1] += from[2 * i + 1];
    }
}

}  // namespace

NodeMeansAccumulator::NodeMeansAccumulator(std::size_t n_nodes)
    : sum_s1_(2 * n_nodes, 0.0),
      sum_s1_sq_(2 * n_nodes, 0.0),
      sum_m_(2 * n_nodes, 0.0),
      sum_m_sq_(2 * n_nodes, 0.0),
      sum_s2_(2 * n_nodes, 0.0),
      sum_s2_sq_(2 * n_nodes, 0.0) {}

void NodeMeansAccumulator::add(const MarketPath& mp) {
    const std::size_t nodes = n_nodes();
    if (mp.s1.size() != nodes)
        throw std::invalid_argument("NodeMeansAccumulator: node count mismatch");
    for (std::size_t i = 0; i < nodes; ++i) {
        comp_add(sum_s1_, i, mp.s1[i]);
        comp_add(sum_s1_sq_, i, mp.s1[i] * mp.s1[i]);
        comp_add(sum_m_, i, mp.m[i]);
        comp_add(sum_m_sq_, i, mp.m[i] * mp.m[i]);
        comp_add(sum_s2_, i, mp.s2[i]);
        comp_add(sum_s2_sq_, i, mp.s2[i] * mp.s2[i]);
    }
    ++n_;
}

void NodeMeansAccumulator::merge(const NodeMeansAccumulator& other) {
    merge_comp(sum_s1_, other.sum_s1_);
    merge_comp(sum_s1_sq_, other.sum_s1_sq_);
    merge_comp(sum_m_, other.sum_m_);
    merge_comp(sum_m_sq_, other.sum_m_sq_);
    merge_comp(sum_s2_, other.sum_s2_);
    merge_comp(sum_s2_sq_, other.sum_s2_sq_);
    n_ += other.n_;
}

NodeMeans NodeMeansAccumulator::finalize() const {
    if (n_ == 0) throw std::invalid_argument("NodeMeansAccumulator: empty");
    NodeMeans out;
    out.n = n_;
    const std::size_t nodes = n_nodes();
    const double n = static_cast<double>(n_);
    auto fill = [&](const std::vector<double>& sums, const std::vector<double>& sq,
                    std::vector<double>& mean, std::vector<double>& se) {
        mean.resize(nodes);
        se.resize(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            const double m = comp_value(sums, i) / n;
            mean[i] = m;
            if (n_ < 2) {
                se[i] = 0.0;
                continue;
            }
            double var = (comp_value(sq, i) - n * m * m) / (n - 1.0);
            if (var < 0.0) var = 0.0;  // rounding at degenerate nodes
            se[i] = std::sqrt(var / n);
        }
    };
    fill(sum_s1_, sum_s1_sq_, out.s1_mean, out.s1_se);
    fill(sum_m_, sum_m_sq_, out.m_mean, out.m_se);
    fill(sum_s2_, sum_s2_sq_, out.s2_mean, out.s2_se);
    return out;
}

NodeMeans expected_means(std::span<const MarketPath> paths) {
    if (paths.empty()) throw std::invalid_argument("expected_means: empty ensemble");
    const TimeGrid* grid = paths.front().grid;
    NodeMeansAccumulator acc(paths.front().s1.size());
    for (const MarketPath& mp : paths) {
        if (mp.grid != grid) throw std::invalid_argument("expected_means: mixed grids");
        acc.add(mp);
    }
    return acc.finalize();
}

}  // namespace negcall
