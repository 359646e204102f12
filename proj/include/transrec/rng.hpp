#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace transrec {

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace detail

// Seeded pseudo-random source with named substreams, so that e.g. parameter
// initialization and triple sampling draw from independent streams derived
// from one master seed. All draws go through our own conversions (not
// std::*_distribution) so sequences are identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

    Rng(std::uint64_t seed, std::string_view stream)
        : engine_(detail::splitmix64(seed ^ detail::fnv1a64(stream))) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, bound), bound >= 1
    std::uint64_t uniform_index(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, Box-Muller
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace transrec
