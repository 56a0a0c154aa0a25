#ifndef MOMEST_RNG_HPP
#define MOMEST_RNG_HPP

// Seedable random source used by every sampler in the library.
//
// The generator is SplitMix64: a 64-bit counter advanced by the golden-ratio
// increment 0x9E3779B97F4A7C15 and passed through the finalizer
//
//     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//     z =  z ^ (z >> 31)
//
// so output k of a stream seeded with s is mix(s + (k + 1) * increment).
// Doubles are built from the top 53 bits as ((bits >> 11) + 0.5) * 2^-53, which
// lies strictly inside (0, 1). Normal deviates use the Marsaglia polar method
// and keep the spare deviate. Replication j of a Monte-Carlo run is seeded
// with derive_seed(master, j) = mix(master + (j + 1) * increment), i.e. the
// j-th output of the master stream.
//
// Nothing here depends on <random> distributions, whose algorithms vary
// between standard libraries, so streams can be reproduced in any language.

#include <cmath>
#include <cstdint>
#include <limits>

namespace momest {

inline constexpr std::uint64_t kSplitMixIncrement = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of replication `index` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix_finalize(master + (index + 1) * kSplitMixIncrement);
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += kSplitMixIncrement;
        return splitmix_finalize(state_);
    }

    /// Uniform deviate in the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace momest

#endif  // MOMEST_RNG_HPP
