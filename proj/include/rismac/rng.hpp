#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "rismac/common.hpp"

namespace rismac {

/// Counter-based generator: output at counter c is a SplitMix64 finalizer of
/// key + c * gamma. Any sample index maps straight to its own draw, so a
/// Monte Carlo loop can be split across threads in any way and still produce
/// the exact same stream.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream_tag)
        : key_(mix(seed ^ (stream_tag * 0x9E3779B97F4A7C15ULL))) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; safe under log().
    double uniform_pos(std::uint64_t counter) const {
        return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard circularly-symmetric complex Gaussian CN(0,1), consuming
    /// counters 2*counter and 2*counter + 1.
    cplx gaussian(std::uint64_t counter) const {
        const double radius = std::sqrt(-std::log(uniform_pos(2 * counter)));
        const double angle = kTwoPi * uniform(2 * counter + 1);
        return cplx{radius * std::cos(angle), radius * std::sin(angle)};
    }

    /// Fills `out` with CN(0,1) entries for noise-sample `sample_index`.
    void gaussian_vector(std::uint64_t sample_index, std::span<cplx> out) const {
        const std::uint64_t base = sample_index * out.size();
        for (std::size_t q = 0; q < out.size(); ++q)
            out[q] = gaussian(base + q);
    }

    /// Draws an index from a probability vector by CDF walk.
    std::size_t categorical(std::uint64_t counter, std::span<const double> probs) const {
        const double u = uniform(counter);
        double cdf = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            cdf += probs[i];
            if (u < cdf) return i;
        }
        return probs.size() - 1;
    }

  private:
    static std::uint64_t mix(std::uint64_t x) {
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t key_;
};

/// Stream tags keep the independent uses of one experiment seed apart.
namespace rng_stream {
inline constexpr std::uint64_t kNoise = 1;           // z draws for the CGF estimators
inline constexpr std::uint64_t kOracleInputs = 2;    // (s, theta) draws in the MI oracle
inline constexpr std::uint64_t kOracleNoise = 3;     // z draws in the MI oracle
inline constexpr std::uint64_t kSimplexDraws = 4;    // random distribution candidates
inline constexpr std::uint64_t kTestChannels = 5;    // random channels in checks
}  // namespace rng_stream

}  // namespace rismac
