#include "rismac/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "rismac/rng.hpp"

namespace rismac {

namespace {

void require_low_power_config(const SystemConfig& cfg) {
    if (cfg.n_rx != 1 || cfg.block_len != 1)
        throw ValidationError("low-power analysis is defined for N = 1, m = 1 only");
}

void require_zero_mean(const SystemConfig& cfg) {
    if (!cfg.constellation.zero_mean())
        throw ValidationError("low-power analysis requires a zero-mean constellation (the '" +
                              cfg.constellation.label() + "' points do not sum to zero)");
}

std::vector<cplx> pattern_gains(const SystemConfig& cfg, const ChannelRealization& ch) {
    const std::size_t n_patterns = cfg.pattern_count();
    std::vector<cplx> gains(n_patterns);
    for (std::size_t a = 0; a < n_patterns; ++a)
        gains[a] = effective_gain(ch, cfg.pattern_angles(a)).front();
    return gains;
}

}  // namespace

std::pair<double, double> high_power_rectangle(const SystemConfig& cfg) {
    cfg.validate();
    const double r1 = std::log2(static_cast<double>(cfg.symbol_count()));
    const double r2 = static_cast<double>(cfg.n_ris) /
                      static_cast<double>(cfg.block_len) *
                      std::log2(static_cast<double>(cfg.phase_count()));
    return {r1, r2};
}

BeamformingResult max_gain_pattern(const SystemConfig& cfg, const ChannelRealization& ch) {
    cfg.validate();
    ch.validate();
    if (ch.n_rx != cfg.n_rx || ch.n_ris != cfg.n_ris)
        throw ValidationError("channel dimensions do not match system config");

    const std::size_t n_patterns = cfg.pattern_count();
    BeamformingResult best;
    best.gain = -1.0;
    for (std::size_t a = 0; a < n_patterns; ++a) {
        const auto g = effective_gain(ch, cfg.pattern_angles(a));
        double gain = 0.0;
        for (const cplx& v : g) gain += std::norm(v);
        // Lexicographic enumeration; strict improvement keeps the smallest pattern on ties.
        if (gain > best.gain) {
            best.gain = gain;
            best.pattern_index = a;
        }
    }
    best.pattern = cfg.pattern_codec().decode(best.pattern_index);
    return best;
}

BeamformingResult beamforming_argmax(const SystemConfig& cfg, const ChannelRealization& ch) {
    if (cfg.n_rx != 1 || ch.n_rx != 1)
        throw ValidationError("beamforming argmax is defined for N = 1 only");
    return max_gain_pattern(cfg, ch);
}

LowPowerExpectations low_power_expectations(const SystemConfig& cfg, const ChannelRealization& ch,
                                            const InputDistributions& dists) {
    cfg.validate();
    ch.validate();
    require_low_power_config(cfg);
    require_zero_mean(cfg);
    if (ch.n_rx != 1 || ch.n_ris != cfg.n_ris)
        throw ValidationError("channel dimensions do not match system config");
    dists.validate(cfg);

    const std::size_t n_patterns = cfg.pattern_count();
    const std::size_t n_symbols = cfg.symbol_count();
    const double pair_work = static_cast<double>(n_patterns) * static_cast<double>(n_patterns) *
                             static_cast<double>(n_symbols) * static_cast<double>(n_symbols);
    if (pair_work > 268435456.0)
        throw ValidationError("low-power enumeration too large: (A^K)^2 * S^2 = " +
                              format_full(pair_work));

    const auto gains = pattern_gains(cfg, ch);
    const auto& symbols = cfg.constellation.points();
    const auto& ws = dists.p_s;
    const auto& wa = dists.p_theta;

    LowPowerExpectations e;
    // E|g(theta1) (s1 - s2)|^2
    for (std::size_t a1 = 0; a1 < n_patterns; ++a1) {
        if (wa[a1] == 0.0) continue;
        double sym = 0.0;
        for (std::size_t i = 0; i < n_symbols; ++i)
            for (std::size_t j = 0; j < n_symbols; ++j)
                sym += ws[i] * ws[j] * std::norm(gains[a1] * (symbols[i] - symbols[j]));
        e.u1 += wa[a1] * sym;
    }
    // E|(g(theta1) - g(theta2)) s1|^2; the direct path cancels in the difference.
    for (std::size_t a1 = 0; a1 < n_patterns; ++a1) {
        if (wa[a1] == 0.0) continue;
        for (std::size_t a2 = 0; a2 < n_patterns; ++a2) {
            if (wa[a2] == 0.0) continue;
            double sym = 0.0;
            for (std::size_t i = 0; i < n_symbols; ++i)
                sym += ws[i] * std::norm((gains[a1] - gains[a2]) * symbols[i]);
            e.u2 += wa[a1] * wa[a2] * sym;
        }
    }
    // E|g(theta1) s1 - g(theta2) s2|^2
    for (std::size_t a1 = 0; a1 < n_patterns; ++a1) {
        if (wa[a1] == 0.0) continue;
        for (std::size_t a2 = 0; a2 < n_patterns; ++a2) {
            if (wa[a2] == 0.0) continue;
            double sym = 0.0;
            for (std::size_t i = 0; i < n_symbols; ++i)
                for (std::size_t j = 0; j < n_symbols; ++j)
                    sym += ws[i] * ws[j] * std::norm(gains[a1] * symbols[i] - gains[a2] * symbols[j]);
            e.u3 += wa[a1] * wa[a2] * sym;
        }
    }
    return e;
}

LowPowerRates low_power_region(const SystemConfig& cfg, const ChannelRealization& ch,
                               const InputDistributions& dists) {
    const auto e = low_power_expectations(cfg, ch, dists);
    return LowPowerRates{e.u1 / kLn2, e.u2 / kLn2, e.u3 / kLn2};
}

CornerPoints corner_points(const SystemConfig& cfg, const ChannelRealization& ch) {
    cfg.validate();
    ch.validate();
    require_low_power_config(cfg);
    if (ch.n_rx != 1) throw ValidationError("corner points are defined for N = 1 only");

    const auto bf = beamforming_argmax(cfg, ch);
    double ri_norm2 = 0.0;
    for (const cplx& v : ch.h_ri) ri_norm2 += std::norm(v);

    CornerPoints out;
    out.r1_max = 2.0 * bf.gain / kLn2;
    out.r2_max = 2.0 * ri_norm2 / kLn2;
    out.condition_holds = bf.gain > ri_norm2;
    out.r1_at_r2_max = out.condition_holds ? 2.0 * (bf.gain - ri_norm2) / kLn2
                                           : std::numeric_limits<double>::quiet_NaN();
    return out;
}

GradientCheckReport lowpower_gradient_check(const SystemConfig& cfg, const ChannelRealization& ch,
                                            const InputDistributions& dists, const McSettings& mc,
                                            double p_small, double fd_step, double rel_tol) {
    require_low_power_config(cfg);
    require_zero_mean(cfg);
    if (!(fd_step > 0.0 && p_small > fd_step))
        throw ValidationError("need 0 < fd_step < p_small for the central difference");
    mc.validate();

    GradientCheckReport rep;
    rep.analytic = low_power_region(cfg, ch, dists);

    SystemConfig hi = cfg, lo = cfg;
    hi.power = p_small + fd_step;
    lo.power = p_small - fd_step;
    const auto sig_hi = detail::build_signal_support(hi, ch, dists);
    const auto sig_lo = detail::build_signal_support(lo, ch, dists);

    const std::size_t n = mc.noise_samples;
    const std::size_t dim = static_cast<std::size_t>(cfg.n_rx) *
                            static_cast<std::size_t>(cfg.block_len);
    std::array<std::vector<double>, 3> diffs;
    for (auto& v : diffs) v.resize(n);

    const CounterRng rng(mc.seed, rng_stream::kNoise);
    const double scale = -1.0 / (static_cast<double>(cfg.block_len) * 2.0 * fd_step);
    std::atomic<std::int64_t> first_bad{-1};

    auto work = [&](std::size_t begin, std::size_t end) {
        detail::CgfScratch scratch;
        scratch.z.resize(dim);
        double out_hi[3], out_lo[3];
        for (std::size_t t = begin; t < end; ++t) {
            rng.gaussian_vector(t, scratch.z);
            double z2 = 0.0;
            for (const cplx& v : scratch.z) z2 += std::norm(v);
            detail::cgf_sample_terms(sig_hi, scratch.z.data(), z2, 0x7u, scratch, out_hi);
            detail::cgf_sample_terms(sig_lo, scratch.z.data(), z2, 0x7u, scratch, out_lo);
            for (int k = 0; k < 3; ++k) {
                const double d = scale * (out_hi[k] - out_lo[k]);
                if (!std::isfinite(d)) {
                    std::int64_t expected = -1;
                    first_bad.compare_exchange_strong(expected, static_cast<std::int64_t>(t));
                    return;
                }
                diffs[static_cast<std::size_t>(k)][t] = d;
            }
        }
    };

    int nt = mc.threads > 0 ? mc.threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nt = std::min<int>(nt, static_cast<int>(std::max<std::size_t>(n, 1)));
    if (nt <= 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + static_cast<std::size_t>(nt) - 1) / static_cast<std::size_t>(nt);
        for (int w = 0; w < nt; ++w) {
            const std::size_t begin = static_cast<std::size_t>(w) * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    if (first_bad.load() >= 0)
        throw NumericalError("non-finite slope term at noise sample " +
                             std::to_string(first_bad.load()));

    const double mult = ci_multiplier(mc.ci_level);
    const double analytic[3] = {rep.analytic.r1, rep.analytic.r2, rep.analytic.r12};
    rep.status = GradientStatus::agree;
    for (int k = 0; k < 3; ++k) {
        const MeanVar mv = mean_and_std_err(diffs[static_cast<std::size_t>(k)]);
        rep.finite_diff[static_cast<std::size_t>(k)] = mv.mean;
        rep.ci[static_cast<std::size_t>(k)] = mult * mv.std_err;
        const double err = std::abs(mv.mean - analytic[k]);
        GradientStatus st;
        if (analytic[k] == 0.0) {
            st = err <= std::max(rep.ci[static_cast<std::size_t>(k)], 1e-12)
                     ? GradientStatus::agree
                     : GradientStatus::disagree;
        } else {
            const double rel = err / std::abs(analytic[k]);
            rep.max_abs_rel_err = std::max(rep.max_abs_rel_err, rel);
            if (rel <= rel_tol)
                st = GradientStatus::agree;
            else if (err <= rep.ci[static_cast<std::size_t>(k)])
                st = GradientStatus::inconclusive;
            else
                st = GradientStatus::disagree;
        }
        if (static_cast<int>(st) > static_cast<int>(rep.status)) rep.status = st;
    }
    return rep;
}

}  // namespace rismac
