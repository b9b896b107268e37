#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace negcall {

/// Logical random-number streams. Each consumer of randomness draws from its
/// own stream so adding a consumer never perturbs the others.
enum class Stream : std::uint64_t {
    kBrownian = 0,  ///< path increments
    kBridge = 1,    ///< crossing-correction uniforms
    kHitting = 2,   ///< closed-form hitting-time draws
    kMinimum = 3,   ///< pre-hit minimum draws
    kTerminal = 4,  ///< independent terminal-value draws
};

namespace detail {

/// splitmix64 finalizer; used only to spread seed/stream bits into keys.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based generator (Philox4x32-10). A generator is addressed by
/// (seed, stream, path); each block index then yields four independent
/// 32-bit words. Pure function of its address, so any path can be
/// regenerated in isolation and thread scheduling cannot affect draws.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, Stream stream, std::uint64_t path_id)
        : path_lo_(static_cast<std::uint32_t>(path_id)),
          path_hi_(static_cast<std::uint32_t>(path_id >> 32)) {
        const std::uint64_t k =
            detail::mix64(seed ^ detail::mix64(static_cast<std::uint64_t>(stream)));
        key0_ = static_cast<std::uint32_t>(k);
        key1_ = static_cast<std::uint32_t>(k >> 32);
    }

    /// The four 32-bit words of counter block `index`.
    std::array<std::uint32_t, 4> block(std::uint64_t index) const {
        std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(index),
                                            static_cast<std::uint32_t>(index >> 32),
                                            path_lo_, path_hi_};
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            ctr = round_once(ctr, k0, k1);
            k0 += kW32A;
            k1 += kW32B;
        }
        return ctr;
    }

    /// Uniform double in (0,1); slot selects one of the two 64-bit lanes of
    /// a block. Never returns an endpoint, so log/quantile transforms are safe.
    double uniform(std::uint64_t index, int slot) const {
        const auto b = block(index);
        const std::uint64_t u =
            (slot == 0) ? (static_cast<std::uint64_t>(b[1]) << 32) | b[0]
                        : (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
        return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; one draw per block index.
    double normal(std::uint64_t index) const {
        const double u1 = uniform(index, 0);
        const double u2 = uniform(index, 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

  private:
    static constexpr std::uint32_t kM4x32A = 0xD2511F53u;
    static constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;
    static constexpr std::uint32_t kW32A = 0x9E3779B9u;
    static constexpr std::uint32_t kW32B = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> round_once(std::array<std::uint32_t, 4> c,
                                                   std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
                static_cast<std::uint32_t>(p0)};
    }

    std::uint32_t key0_ = 0;
    std::uint32_t key1_ = 0;
    std::uint32_t path_lo_ = 0;
    std::uint32_t path_hi_ = 0;
};

}  // namespace negcall
