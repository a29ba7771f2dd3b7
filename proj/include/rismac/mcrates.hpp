#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rismac/channel.hpp"
#include "rismac/common.hpp"
#include "rismac/distributions.hpp"
#include "rismac/system.hpp"

namespace rismac {

struct McSettings {
    std::uint64_t seed = 1;
    std::size_t noise_samples = 100000;
    double ci_level = 0.95;
    /// Worker threads (0 = hardware concurrency). Results are bit-identical
    /// for every value; this only trades wall time.
    int threads = 0;

    void validate() const;
};

/// One conditional-CGF estimate, in bits.
struct CgfEstimate {
    double kappa_bits = 0.0;
    double ci_halfwidth = 0.0;
    double std_err = 0.0;
    /// Standard error of the per-sample terms after removing the common
    /// -||z||^2 * log2(e) component. Pentagon comparisons made with a shared
    /// noise stream fluctuate on this scale, not on std_err.
    double resid_std_err = 0.0;
    std::size_t samples = 0;
};

/// The three per-symbol rate bounds with their confidence intervals.
struct RateBounds {
    double b1 = 0.0, b2 = 0.0, b12 = 0.0;
    double ci1 = 0.0, ci2 = 0.0, ci12 = 0.0;
    double se1 = 0.0, se2 = 0.0, se12 = 0.0;
    double resid_se1 = 0.0, resid_se2 = 0.0, resid_se12 = 0.0;
};

/// Exponent of one inner term: the negative squared distance between the
/// received point and a competing noiseless hypothesis. kind 1 varies the
/// symbol block, kind 2 the phase pattern, kind 3 both.
double u_value(int kind, const SystemConfig& cfg, const ChannelRealization& ch,
               std::span<const cplx> s1, std::span<const cplx> s2,
               std::span<const double> theta1, std::span<const double> theta2,
               std::span<const cplx> z);

/// Estimates kappa(u_kind | s1, theta1, z): exact weighted sums over the
/// input alphabets, Monte Carlo only over the Gaussian noise, inner
/// log-average via max-shifted log-sum-exp.
CgfEstimate conditional_cgf(int kind, const SystemConfig& cfg, const ChannelRealization& ch,
                            const InputDistributions& dists, const McSettings& mc);

/// All three bounds from one pass over a common noise stream:
/// B_l = -N*log2(e) - kappa_l / m.
RateBounds rate_bounds(const SystemConfig& cfg, const ChannelRealization& ch,
                       const InputDistributions& dists, const McSettings& mc);

struct MutualInfoEstimate {
    double i1 = 0.0, i2 = 0.0, i12 = 0.0;
    double se1 = 0.0, se2 = 0.0, se12 = 0.0;
    std::size_t samples = 0;
};

/// Independent cross-check for tiny instances (N*m <= 2, S^m * A^K <= 64):
/// samples (s, theta, z) jointly, forms the received point, and averages
/// mixture-density log-ratios directly. Shares no code path and no RNG
/// stream with the CGF estimator.
MutualInfoEstimate mutual_info_oracle(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const InputDistributions& dists, std::size_t samples,
                                      std::uint64_t seed = 0x517cc1b727220a95ULL);

namespace detail {

/// Noiseless signal vectors x(b, a) = sqrt(P) * g(theta_a)^{m (x)} * s_b over
/// the support of the input distributions, with the pair geometry needed to
/// evaluate every exponent in O(1).
struct SignalSupport {
    std::size_t dim = 0;
    std::vector<std::uint32_t> blocks;    // alphabet indices with p_s > 0
    std::vector<std::uint32_t> patterns;  // alphabet indices with p_theta > 0
    std::vector<double> wb, wa;           // matching probabilities
    std::vector<double> wj;               // joint weights, pair-indexed
    std::vector<cplx> x;                  // pair-major, dim entries each
    std::vector<double> norm2;            // ||x||^2 per pair
    std::vector<double> cross2;           // 2*Re(x_o^H x_i); empty above kCrossCap pairs

    static constexpr std::size_t kCrossCap = 1024;

    std::size_t n_blocks() const { return blocks.size(); }
    std::size_t n_patterns() const { return patterns.size(); }
    std::size_t n_pairs() const { return blocks.size() * patterns.size(); }

    double cross(std::size_t o, std::size_t i) const;
};

SignalSupport build_signal_support(const SystemConfig& cfg, const ChannelRealization& ch,
                                   const InputDistributions& dists);

struct CgfScratch {
    std::vector<cplx> z;
    std::vector<double> a2re, d, u;
};

/// Per-noise-sample outer-averaged log terms (bits) for the kinds selected
/// by `mask` (bit k-1 for kind k). `zn` is ||z||^2.
void cgf_sample_terms(const SignalSupport& sig, const cplx* z, double zn, unsigned mask,
                      CgfScratch& scratch, double out[3]);

/// Shared driver: fills per-sample term buffers for the selected kinds plus
/// the ||z||^2 record, deterministically for any thread count.
void run_cgf_samples(const SignalSupport& sig, const McSettings& mc, unsigned mask,
                     std::array<std::vector<double>, 3>& terms, std::vector<double>& zn);

}  // namespace detail

}  // namespace rismac
