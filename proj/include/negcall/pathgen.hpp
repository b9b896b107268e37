#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace negcall {

enum class GridKind { uniform_t, uniform_qv };

/// Discretization request for the unit interval.
struct GridSpec {
    GridKind kind = GridKind::uniform_qv;
    std::size_t n_steps = 4096;
    /// uniform_qv only: the grid covers qv-times [0, tau_max] and then appends
    /// the terminal calendar node t = 1.
    double tau_max = 40.0;
};

/// A realized grid carrying both clocks. qv-time is the primary coordinate:
/// calendar times are derived from it, and per-step calendar increments are
/// computed on the exponential side so they stay positive even where t is
/// indistinguishable from 1 in double precision (tau >~ 36). The terminal
/// node t = 1 carries tau = +infinity.
struct TimeGrid {
    GridKind kind = GridKind::uniform_qv;
    std::vector<double> t;     ///< calendar times, t[0] = 0, t.back() = 1
    std::vector<double> tau;   ///< qv-times, strictly increasing, +inf at the end
    std::vector<double> dt;    ///< calendar step lengths, all > 0
    std::vector<double> dtau;  ///< qv step lengths (+inf on a step into t = 1)
    /// exp(tau[k]/2) = (1 - t[k])^{-1/2}, the singular-integrand weight at
    /// each node (+inf at the terminal node, never used as a weight).
    std::vector<double> weight;
    /// Number of leading steps over which the stopped integral evolves.
    /// uniform_qv freezes it across the appended terminal step (truncation
    /// stays explicit); uniform_t evolves it on every step.
    std::size_t m_active_steps = 0;

    std::size_t n_nodes() const { return t.size(); }
    std::size_t n_steps() const { return t.size() - 1; }
};

/// Builds the grid for a spec. uniform_t: t_k = k/n. uniform_qv:
/// tau_k = (k/n) * tau_max plus the appended terminal node. Throws
/// std::invalid_argument on violated spec invariants.
TimeGrid make_grid(const GridSpec& spec);

/// Gaussian increments of the single driving Brownian motion on a grid.
/// Regenerating with the same (seed, path_id) is bit-identical.
struct BrownianPath {
    std::vector<double> increments;  ///< increments[k] ~ Normal(0, dt[k])
    std::uint64_t seed = 0;
    std::uint64_t path_id = 0;
};

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed, std::uint64_t path_id);

/// First time standard Brownian motion reaches level a, sampled from the
/// exact law a^2/Z^2 (Z standard normal). Always finite and positive.
double sample_hitting_time(double a, std::uint64_t seed, std::uint64_t path_id);

/// Minimum of standard Brownian motion before it first reaches level a,
/// sampled from the exact law -a(1-U)/U, so P(min < -L) = a/(a+L). Always <= 0.
double sample_pre_hit_minimum(double a, std::uint64_t seed, std::uint64_t path_id);

/// Binary ensemble dump for cross-backend regression tests. Little-endian
/// header (grid kind, n_steps, tau_max, seed, n_paths) followed by the
/// increments of paths 0..n_paths-1, row-major, as little-endian 64-bit
/// floats.
void write_brownian_dump(std::ostream& os, const GridSpec& spec, std::uint64_t seed,
                         std::uint64_t n_paths);

struct BrownianDump {
    GridSpec spec;
    std::uint64_t seed = 0;
    std::uint64_t n_paths = 0;
    std::vector<double> increments;  ///< row-major, n_paths x grid.n_steps()
};

/// Parses a dump written by write_brownian_dump. Throws std::runtime_error
/// on a malformed header or truncated body.
BrownianDump read_brownian_dump(std::istream& is);

}  // namespace negcall
