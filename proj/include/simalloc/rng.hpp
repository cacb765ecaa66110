#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <string_view>

namespace simalloc::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Vigna / Steele-Lea-Flood). Full-avalanche scrambler,
// also used to derive named substreams.
constexpr std::uint64_t scramble(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// Derives the seed of substream `stream` of the generator seeded by `seed`.
// Counter-based: no generator state is advanced, so any (condition,
// replication) stream can be reconstructed independently and in parallel.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return scramble(seed + kGolden * (stream + 1));
}

// FNV-1a, used to turn strategy names into stream ids.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += kGolden;
        return scramble(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1); safe as a log/ratio argument.
    double uniform_open01() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Draws two uniforms per call; no
    // cached spare, so the output is a pure function of the stream position.
    double normal() noexcept {
        const double u1 = uniform_open01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

namespace detail {

// (1-p)^n by binary exponentiation. Only IEEE multiplications, so the
// result is bit-identical on any conforming platform (unlike libm pow).
inline double pow_q(double q, std::int64_t n) noexcept {
    double r = 1.0;
    double b = q;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

} // namespace detail

// Exact Binomial(n, p) sample by inverse-CDF chop-down. Expected cost is
// O(n*p) basic arithmetic; no libm in the path, which keeps replications
// bit-identical across platforms. When (1-p)^n would underflow, the draw
// is split recursively as B(n,p) = B(n/2,p) + B(n-n/2,p).
inline std::int64_t binomial(SplitMix64& g, std::int64_t n, double p) noexcept {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(g, n, 1.0 - p);

    const double q = 1.0 - p;
    double f = detail::pow_q(q, n);
    if (f < 1e-290) {
        const std::int64_t half = n / 2;
        return binomial(g, half, p) + binomial(g, n - half, p);
    }

    const double u = g.uniform01();
    double cum = f;
    std::int64_t k = 0;
    while (cum <= u && k < n) {
        ++k;
        f *= (static_cast<double>(n - k + 1) * p) / (static_cast<double>(k) * q);
        cum += f;
    }
    return k;
}

} // namespace simalloc::rng
