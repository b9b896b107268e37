#include "negcall/pathgen.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "negcall/analytics.hpp"
#include "negcall/rng.hpp"

namespace negcall {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_spec(const GridSpec& spec) {
    if (spec.n_steps < 2) throw std::invalid_argument("GridSpec: n_steps must be >= 2");
    if (spec.kind == GridKind::uniform_qv && !(spec.tau_max > 0.0))
        throw std::invalid_argument("GridSpec: tau_max must be > 0");
}

}  // namespace

TimeGrid make_grid(const GridSpec& spec) {
    check_spec(spec);
    TimeGrid g;
    g.kind = spec.kind;
    const std::size_t n = spec.n_steps;

    if (spec.kind == GridKind::uniform_t) {
        g.t.resize(n + 1);
        g.tau.resize(n + 1);
        g.weight.resize(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            // k/n is exact for power-of-two n and within half an ulp otherwise;
            // the same quotient at (2k, 2n) is bit-identical, so doubling the
            // step count refines dyadically.
            g.t[k] = static_cast<double>(k) / static_cast<double>(n);
            g.tau[k] = (k < n) ? qv_time(g.t[k]) : kInf;
            g.weight[k] = (k < n) ? std::exp(0.5 * g.tau[k]) : kInf;
        }
        g.t[n] = 1.0;
        g.m_active_steps = n;
    } else {
        // qv-uniform nodes 0..n, then the appended terminal calendar node.
        g.t.resize(n + 2);
        g.tau.resize(n + 2);
        g.weight.resize(n + 2);
        for (std::size_t k = 0; k <= n; ++k) {
            g.tau[k] = (static_cast<double>(k) / static_cast<double>(n)) * spec.tau_max;
            g.t[k] = calendar_time(g.tau[k]);
            g.weight[k] = std::exp(0.5 * g.tau[k]);
        }
        g.t[n + 1] = 1.0;
        g.tau[n + 1] = kInf;
        g.weight[n + 1] = kInf;
        g.m_active_steps = n;
    }

    const std::size_t steps = g.n_steps();
    g.dt.resize(steps);
    g.dtau.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        g.dtau[k] = g.tau[k + 1] - g.tau[k];
        if (spec.kind == GridKind::uniform_t) {
            g.dt[k] = g.t[k + 1] - g.t[k];
        } else if (k < n) {
            // e^{-tau_k} - e^{-tau_{k+1}}, evaluated without cancellation;
            // positive even where the t nodes have collided with 1.
            g.dt[k] = std::exp(-g.tau[k]) * (-std::expm1(-g.dtau[k]));
        } else {
            g.dt[k] = std::exp(-spec.tau_max);  // remaining calendar mass after truncation
        }
    }
    return g;
}

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed, std::uint64_t path_id) {
    BrownianPath bp;
    bp.seed = seed;
    bp.path_id = path_id;
    const std::size_t steps = grid.n_steps();
    bp.increments.resize(steps);
    const CounterRng rng(seed, Stream::kBrownian, path_id);
    for (std::size_t k = 0; k < steps; ++k)
        bp.increments[k] = std::sqrt(grid.dt[k]) * rng.normal(k);
    return bp;
}

double sample_hitting_time(double a, std::uint64_t seed, std::uint64_t path_id) {
    if (!(a > 0.0)) throw std::invalid_argument("sample_hitting_time: level must be > 0");
    const CounterRng rng(seed, Stream::kHitting, path_id);
    for (std::uint64_t idx = 0;; ++idx) {
        const double z = rng.normal(idx);
        if (z != 0.0) return (a * a) / (z * z);
    }
}

double sample_pre_hit_minimum(double a, std::uint64_t seed, std::uint64_t path_id) {
    if (!(a > 0.0)) throw std::invalid_argument("sample_pre_hit_minimum: level must be > 0");
    const CounterRng rng(seed, Stream::kMinimum, path_id);
    const double u = rng.uniform(0, 0);
    return -a * (1.0 - u) / u;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("brownian dump: truncated stream");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

constexpr std::uint64_t kDumpMagic = 0x314853544150434Eull;  // "NCPATHS1"

}  // namespace

void write_brownian_dump(std::ostream& os, const GridSpec& spec, std::uint64_t seed,
                         std::uint64_t n_paths) {
    const TimeGrid grid = make_grid(spec);
    put_u64(os, kDumpMagic);
    put_u64(os, spec.kind == GridKind::uniform_t ? 0 : 1);
    put_u64(os, spec.n_steps);
    put_f64(os, spec.tau_max);
    put_u64(os, seed);
    put_u64(os, n_paths);
    for (std::uint64_t p = 0; p < n_paths; ++p) {
        const BrownianPath bp = sample_brownian(grid, seed, p);
        for (double x : bp.increments) put_f64(os, x);
    }
}

BrownianDump read_brownian_dump(std::istream& is) {
    if (get_u64(is) != kDumpMagic) throw std::runtime_error("brownian dump: bad magic");
    BrownianDump d;
    const std::uint64_t kind = get_u64(is);
    if (kind > 1) throw std::runtime_error("brownian dump: bad grid kind");
    d.spec.kind = (kind == 0) ? GridKind::uniform_t : GridKind::uniform_qv;
    d.spec.n_steps = get_u64(is);
    d.spec.tau_max = get_f64(is);
    d.seed = get_u64(is);
    d.n_paths = get_u64(is);
    const TimeGrid grid = make_grid(d.spec);
    d.increments.resize(d.n_paths * grid.n_steps());
    for (double& x : d.increments) x = get_f64(is);
    return d;
}

}  // namespace negcall
