#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>

namespace regmkt {

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// splitmix64 output at an arbitrary counter position (random access).
inline std::uint64_t splitmix_at(std::uint64_t key, std::uint64_t counter) {
    return mix64(key + counter * 0x9e3779b97f4a7c15ULL);
}

inline double uniform_open(std::uint64_t bits) {
    // (0, 1]: 53 mantissa bits, then flip so the log below never sees 0
    return 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;
}
inline double uniform_halfopen(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace detail

/// Deterministic stream of i.i.d. standard normal increment vectors, keyed by
/// (master seed, path index) and addressed by (step, block). Identical
/// coordinates produce identical draws regardless of thread scheduling, and a
/// step's draws do not depend on how many draws earlier steps consumed.
/// Block 0 is the main increment of a step; the near-pole guard takes fresh
/// blocks >= 1 for its sub-steps.
class BrownianStream {
public:
    static constexpr std::uint32_t kMaxBlocksPerStep = 1u << 18;
    static constexpr std::uint32_t kMaxDimension = 128;

    BrownianStream(std::uint64_t master_seed, std::uint64_t path_index)
        : key_(detail::mix64(master_seed ^ detail::mix64(path_index + 0x632be59bd9b4e019ULL))) {}

    /// Fill `out` with standard normals for (step, block). Box-Muller, one
    /// pair of counter words per normal.
    void normals(std::uint64_t step, std::uint32_t block, std::span<double> out) const {
        if (out.size() > kMaxDimension)
            throw std::invalid_argument("BrownianStream: dimension too large");
        if (block >= kMaxBlocksPerStep)
            throw std::invalid_argument("BrownianStream: block index exhausted");
        const std::uint64_t base =
            (step << 26) ^ (static_cast<std::uint64_t>(block) << 8);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double u1 = detail::uniform_open(detail::splitmix_at(key_, base + 2 * i));
            const double u2 =
                detail::uniform_halfopen(detail::splitmix_at(key_, base + 2 * i + 1));
            out[i] = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
        }
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace regmkt
