#pragma once

// Counter-based random generator with named stream splitting. Every module
// draws from its own stream keyed by (seed, label), so adding draws in one
// module never shifts another module's sequence. Output is reproducible
// across platforms; no libc or libstdc++ distributions are involved.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace afcsim {

namespace detail {

// SplitMix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace detail

class Rng {
  public:
    Rng() : key_(0) {}
    Rng(std::uint64_t seed, std::string_view stream_label)
        : key_(detail::mix64(seed ^ detail::fnv1a(stream_label))) {}

    // Derive an independent child stream deterministically.
    Rng split(std::string_view label) const {
        Rng r;
        r.key_ = detail::mix64(key_ ^ detail::fnv1a(label));
        return r;
    }
    Rng split(std::uint64_t index) const {
        Rng r;
        r.key_ = detail::mix64(key_ ^ (0xa0761d6478bd642fULL + index));
        return r;
    }

    std::uint64_t next_u64() { return detail::mix64(key_ ^ detail::mix64(counter_++)); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double mean) {
        double u;
        do { u = uniform(); } while (u <= 0.0);
        return -mean * std::log(u);
    }

    double gaussian(double mean = 0.0, double sigma = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sigma * spare_;
        }
        double u1, u2;
        do { u1 = uniform(); } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mean + sigma * r * std::cos(a);
    }

    // Poisson via inversion for small means, normal-tail-safe PTRS-like
    // rejection for large means. Exact enough for counting statistics.
    std::uint64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 30.0) {
            const double l = std::exp(-lambda);
            std::uint64_t k = 0;
            double p = 1.0;
            do {
                ++k;
                p *= uniform();
            } while (p > l);
            return k - 1;
        }
        // Hörmann's transformed rejection (PTRS)
        const double b = 0.931 + 2.53 * std::sqrt(lambda);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        while (true) {
            double u = uniform() - 0.5;
            double v = uniform();
            double us = 0.5 - std::abs(u);
            double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            const double lg = std::lgamma(k + 1.0);
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <= k * std::log(lambda) - lambda - lg)
                return static_cast<std::uint64_t>(k);
        }
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace afcsim
