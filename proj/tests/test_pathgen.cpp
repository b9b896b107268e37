#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "negcall/analytics.hpp"
#include "negcall/pathgen.hpp"
#include "negcall/rng.hpp"
#include "support/constants.hpp"

using namespace negcall;
namespace ts = negcall::testsupport;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("counter rng is a pure function of its address") {
    const CounterRng rng_a(42, Stream::kBrownian, 7);
    const CounterRng rng_b(42, Stream::kBrownian, 7);
    for (std::uint64_t idx : {0ull, 1ull, 1000ull, (1ull << 40)}) {
        CHECK(rng_a.block(idx) == rng_b.block(idx));
        CHECK(rng_a.uniform(idx, 0) == rng_b.uniform(idx, 0));
        CHECK(rng_a.normal(idx) == rng_b.normal(idx));
    }
    const CounterRng other_path(42, Stream::kBrownian, 8);
    const CounterRng other_stream(42, Stream::kBridge, 7);
    const CounterRng other_seed(43, Stream::kBrownian, 7);
    CHECK(rng_a.block(0) != other_path.block(0));
    CHECK(rng_a.block(0) != other_stream.block(0));
    CHECK(rng_a.block(0) != other_seed.block(0));
}

TEST_CASE("counter rng uniforms stay strictly inside (0,1)") {
    const CounterRng rng(123, Stream::kBridge, 0);
    for (std::uint64_t i = 0; i < 20000; ++i) {
        for (int slot : {0, 1}) {
            const double u = rng.uniform(i, slot);
            CHECK(u > 0.0);
            CHECK(u < 1.0);
        }
    }
}

TEST_CASE("counter rng moments and serial correlation") {
    const CounterRng rng(2024, Stream::kBrownian, 0);
    const std::size_t n = 100000;
    double sum = 0.0, sq = 0.0, lag = 0.0, prev = 0.0;
    double usum = 0.0, usq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.normal(i);
        sum += z;
        sq += z * z;
        if (i > 0) lag += z * prev;
        prev = z;
        const double u = rng.uniform(i, 1);
        usum += u;
        usq += u * u;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = sq / nn - mean * mean;
    CHECK(std::fabs(mean) <= 3.0 / std::sqrt(nn));
    CHECK(std::fabs(var - 1.0) <= 3.0 * std::sqrt(2.0 / nn));
    CHECK(std::fabs(lag / (nn - 1.0)) <= 3.0 / std::sqrt(nn));
    const double umean = usum / nn;
    const double uvar = usq / nn - umean * umean;
    CHECK(std::fabs(umean - 0.5) <= 3.0 * std::sqrt(1.0 / 12.0 / nn));
    CHECK(std::fabs(uvar - 1.0 / 12.0) <= 3.0 * std::sqrt(2.0 / nn) / 12.0);
}

TEST_CASE("calendar-uniform grid") {
    const GridSpec spec{GridKind::uniform_t, 16, 40.0};
    const TimeGrid g = make_grid(spec);
    REQUIRE(g.n_nodes() == 17);
    CHECK(g.m_active_steps == 16);
    for (std::size_t k = 0; k <= 16; ++k) CHECK(g.t[k] == static_cast<double>(k) / 16.0);
    CHECK(g.t.front() == 0.0);
    CHECK(g.t.back() == 1.0);
    CHECK(g.tau.back() == kInf);
    for (std::size_t k = 0; k + 1 < g.n_nodes(); ++k) {
        CHECK(g.tau[k] == qv_time(g.t[k]));
        CHECK(g.weight[k] == std::exp(0.5 * g.tau[k]));
        CHECK(g.dt[k] > 0.0);
        CHECK(g.dt[k] == g.t[k + 1] - g.t[k]);
        CHECK(g.tau[k + 1] > g.tau[k]);
    }
    CHECK(g.dtau.back() == kInf);
}

TEST_CASE("qv-uniform grid") {
    const GridSpec spec{GridKind::uniform_qv, 4096, 40.0};
    const TimeGrid g = make_grid(spec);
    REQUIRE(g.n_nodes() == 4098);
    CHECK(g.m_active_steps == 4096);
    CHECK(g.t.front() == 0.0);
    CHECK(g.t.back() == 1.0);
    CHECK(g.tau.front() == 0.0);
    CHECK(g.tau[4096] == 40.0);
    CHECK(g.tau.back() == kInf);
    CHECK(g.dtau.back() == kInf);
    CHECK(g.dt.back() == std::exp(-40.0));

    double sum_dt = 0.0;
    for (std::size_t k = 0; k < g.n_steps(); ++k) {
        CHECK(g.dt[k] > 0.0);
        sum_dt += g.dt[k];
    }
    CHECK(std::fabs(sum_dt - 1.0) <= 1e-12);

    std::size_t collided = 0;
    for (std::size_t k = 0; k + 1 < g.n_nodes(); ++k) {
        CHECK(g.tau[k + 1] > g.tau[k]);
        CHECK(g.t[k + 1] >= g.t[k]);
        // the calendar coordinate is derived from the qv coordinate, bit for bit
        CHECK(g.t[k] == calendar_time(g.tau[k]));
        if (g.t[k] < 1.0) {
            // the inverse transform agrees up to the quantization of 1 - t,
            // which costs exp(tau) * 2^-53 in tau near the collision point
            CHECK(std::fabs(g.tau[k] - qv_time(g.t[k])) <=
                  1e-12 * std::max(1.0, g.tau[k]) + 2e-16 * std::exp(g.tau[k]));
        } else {
            ++collided;  // t has collided with 1; tau keeps the resolution
        }
    }
    CHECK(collided > 0);  // tau_max 40 runs past the double-precision edge of t
}

TEST_CASE("doubling the qv step count refines the grid dyadically") {
    const TimeGrid coarse = make_grid({GridKind::uniform_qv, 128, 40.0});
    const TimeGrid fine = make_grid({GridKind::uniform_qv, 256, 40.0});
    for (std::size_t k = 0; k <= 128; ++k) {
        CHECK(coarse.tau[k] == fine.tau[2 * k]);
        CHECK(coarse.t[k] == fine.t[2 * k]);
    }
}

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS(make_grid({GridKind::uniform_t, 1, 40.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({GridKind::uniform_qv, 0, 40.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({GridKind::uniform_qv, 64, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({GridKind::uniform_qv, 64, -1.0}), std::invalid_argument);
    CHECK_NOTHROW(make_grid({GridKind::uniform_t, 2, 40.0}));
    CHECK_NOTHROW(make_grid({GridKind::uniform_qv, 2, 0.5}));
}

TEST_CASE("brownian increments carry the per-step variances") {
    const TimeGrid g = make_grid({GridKind::uniform_qv, 64, 10.0});
    const BrownianPath again = sample_brownian(g, 555, 3);
    const BrownianPath same = sample_brownian(g, 555, 3);
    CHECK(again.increments == same.increments);

    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::uint64_t p = 0; p < 400; ++p) {
        const BrownianPath bp = sample_brownian(g, 555, p);
        REQUIRE(bp.increments.size() == g.n_steps());
        for (std::size_t k = 0; k < bp.increments.size(); ++k) {
            const double z = bp.increments[k] / std::sqrt(g.dt[k]);
            sum += z;
            sq += z * z;
            ++n;
        }
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    CHECK(std::fabs(mean) <= 3.0 / std::sqrt(nn));
    CHECK(std::fabs(sq / nn - mean * mean - 1.0) <= 3.0 * std::sqrt(2.0 / nn));
}

TEST_CASE("hitting-time draws follow the inverse-chi-square law") {
    const double a = ts::kHitLevel;
    const std::size_t n = 20000;
    std::size_t below_median = 0, beyond_40 = 0;
    for (std::uint64_t p = 0; p < n; ++p) {
        const double t = sample_hitting_time(a, 777, p);
        CHECK(t > 0.0);
        CHECK(std::isfinite(t));
        if (t <= ts::kMedianHitTime) ++below_median;
        if (t > 40.0) ++beyond_40;
    }
    const double nn = static_cast<double>(n);
    const double se_med = std::sqrt(0.25 / nn);
    CHECK(std::fabs(below_median / nn - 0.5) <= 3.0 * se_med);
    const double q = ts::kHitTail40;
    CHECK(std::fabs(beyond_40 / nn - q) <= 3.0 * std::sqrt(q * (1.0 - q) / nn));
    CHECK_THROWS_AS(sample_hitting_time(0.0, 1, 0), std::invalid_argument);
}

TEST_CASE("pre-hit minimum draws follow the ruin law") {
    const double a = ts::kHitLevel;
    const std::size_t n = 20000;
    std::size_t below1 = 0, below5 = 0;
    for (std::uint64_t p = 0; p < n; ++p) {
        const double m = sample_pre_hit_minimum(a, 888, p);
        CHECK(m <= 0.0);
        if (m < -1.0) ++below1;
        if (m < -5.0) ++below5;
    }
    const double nn = static_cast<double>(n);
    CHECK(std::fabs(below1 / nn - ts::kRuin1) <=
          3.0 * std::sqrt(ts::kRuin1 * (1.0 - ts::kRuin1) / nn));
    CHECK(std::fabs(below5 / nn - ts::kRuin5) <=
          3.0 * std::sqrt(ts::kRuin5 * (1.0 - ts::kRuin5) / nn));
    CHECK_THROWS_AS(sample_pre_hit_minimum(-1.0, 1, 0), std::invalid_argument);
}

TEST_CASE("brownian dump round-trips bitwise") {
    const GridSpec spec{GridKind::uniform_qv, 32, 5.0};
    std::stringstream ss;
    write_brownian_dump(ss, spec, 999, 7);
    const BrownianDump dump = read_brownian_dump(ss);
    CHECK(dump.seed == 999);
    CHECK(dump.n_paths == 7);
    CHECK(dump.spec.kind == spec.kind);
    CHECK(dump.spec.n_steps == spec.n_steps);
    CHECK(dump.spec.tau_max == spec.tau_max);

    const TimeGrid g = make_grid(spec);
    REQUIRE(dump.increments.size() == 7 * g.n_steps());
    for (std::uint64_t p = 0; p < 7; ++p) {
        const BrownianPath bp = sample_brownian(g, 999, p);
        for (std::size_t k = 0; k < g.n_steps(); ++k)
            CHECK(dump.increments[p * g.n_steps() + k] == bp.increments[k]);
    }
}

TEST_CASE("brownian dump rejects malformed input") {
    std::stringstream empty;
    CHECK_THROWS_AS(read_brownian_dump(empty), std::runtime_error);

    std::stringstream bad_magic;
    bad_magic << "NOTADUMPXXXXXXXXXXXXXXXXXXXXXXXXXXXXXXXX";
    CHECK_THROWS_AS(read_brownian_dump(bad_magic), std::runtime_error);

    std::stringstream truncated;
    write_brownian_dump(truncated, {GridKind::uniform_t, 8, 40.0}, 1, 3);
    std::string bytes = truncated.str();
    bytes.resize(bytes.size() - 5);
    std::stringstream cut(bytes);
    CHECK_THROWS_AS(read_brownian_dump(cut), std::runtime_error);
}
