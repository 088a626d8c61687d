#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace rofu {

// Deterministic, platform-independent randomness. Every stream is derived
// from a run seed plus a textual label, and environment noise is keyed by
// (seed, label, counters) so that agent decisions can never perturb it.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Sub-stream key: derive(seed, "env"), derive(seed, "agent", round, arm), ...
constexpr std::uint64_t derive(std::uint64_t seed, std::string_view label,
                               std::uint64_t c0 = 0, std::uint64_t c1 = 0) {
    std::uint64_t h = mix(seed, hash_label(label));
    h = mix(h, c0);
    h = mix(h, c1);
    return h;
}

// Sequential generator over a derived key.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller; uses exactly two uniforms per call.
    double next_gaussian() {
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

// One-shot keyed draws for counter-based noise streams.
inline double keyed_gaussian(std::uint64_t seed, std::string_view label,
                             std::uint64_t c0, std::uint64_t c1 = 0) {
    RngStream s(derive(seed, label, c0, c1));
    return s.next_gaussian();
}

inline double keyed_uniform01(std::uint64_t seed, std::string_view label,
                              std::uint64_t c0, std::uint64_t c1 = 0) {
    RngStream s(derive(seed, label, c0, c1));
    return s.next_double();
}

}  // namespace rofu
