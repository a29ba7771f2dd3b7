#pragma once

#include <array>
#include <utility>
#include <vector>

#include "rismac/channel.hpp"
#include "rismac/common.hpp"
#include "rismac/distributions.hpp"
#include "rismac/mcrates.hpp"
#include "rismac/system.hpp"

namespace rismac {

/// High-power rate ceiling (log2 S, (K/m) log2 A). The region converges to
/// this rectangle as P grows.
std::pair<double, double> high_power_rectangle(const SystemConfig& cfg);

struct BeamformingResult {
    std::size_t pattern_index = 0;
    std::vector<int> pattern;  // phase indices, length K
    double gain = 0.0;         // squared magnitude of the effective gain
};

/// Exhaustive argmax of |h_ri^T e^{j theta} + h_d|^2 over all patterns;
/// ties go to the lexicographically smallest pattern. N = 1 only, where the
/// low-power theory lives.
BeamformingResult beamforming_argmax(const SystemConfig& cfg, const ChannelRealization& ch);

/// Same search for any N, ranking patterns by total received power
/// ||H_ri e^{j theta} + h_d||^2. Used to pick the point-mass candidate in
/// the region search; coincides with beamforming_argmax when N = 1.
BeamformingResult max_gain_pattern(const SystemConfig& cfg, const ChannelRealization& ch);

struct LowPowerExpectations {
    double u1 = 0.0, u2 = 0.0, u3 = 0.0;
};

/// Exact expectations of the three low-power exponents by enumeration over
/// (s1, s2, theta1, theta2) with the product distribution. Requires N = 1,
/// m = 1 and a zero-mean constellation.
LowPowerExpectations low_power_expectations(const SystemConfig& cfg, const ChannelRealization& ch,
                                            const InputDistributions& dists);

/// Normalized rates (bits per symbol per unit power) in the P -> 0 limit.
struct LowPowerRates {
    double r1 = 0.0, r2 = 0.0, r12 = 0.0;
};

LowPowerRates low_power_region(const SystemConfig& cfg, const ChannelRealization& ch,
                               const InputDistributions& dists);

struct CornerPoints {
    double r1_max = 0.0;        // best normalized rate for encoder 1 (pattern pinned)
    double r2_max = 0.0;        // best normalized rate for encoder 2 (uniform patterns)
    double r1_at_r2_max = 0.0;  // encoder-1 rate alongside r2_max; NaN when not applicable
    bool condition_holds = false;  // beamforming gain strictly above ||h_ri||^2
};

CornerPoints corner_points(const SystemConfig& cfg, const ChannelRealization& ch);

enum class GradientStatus { agree, inconclusive, disagree };

struct GradientCheckReport {
    LowPowerRates analytic;
    std::array<double, 3> finite_diff{};  // d/dP of B1, B2, B12 near zero power
    std::array<double, 3> ci{};           // CI half-widths of the slopes
    double max_abs_rel_err = 0.0;
    GradientStatus status = GradientStatus::agree;
};

/// Central finite difference of the Monte Carlo rate bounds at P = p_small
/// +/- fd_step with a shared noise stream, against the exact low-power
/// slopes. The slope CI comes from per-sample differencing, so the common
/// noise component cancels exactly.
GradientCheckReport lowpower_gradient_check(const SystemConfig& cfg, const ChannelRealization& ch,
                                            const InputDistributions& dists, const McSettings& mc,
                                            double p_small = 1e-3, double fd_step = 5e-4,
                                            double rel_tol = 0.05);

}  // namespace rismac
