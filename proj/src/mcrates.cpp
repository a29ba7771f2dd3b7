#include "rismac/mcrates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "rismac/rng.hpp"

namespace rismac {

void McSettings::validate() const {
    if (noise_samples < 100) throw ValidationError("noise_samples must be >= 100");
    if (!(ci_level > 0.0 && ci_level < 1.0)) throw ValidationError("ci_level must lie in (0,1)");
    if (threads < 0) throw ValidationError("threads must be >= 0");
}

namespace {

void check_instance(const SystemConfig& cfg, const ChannelRealization& ch,
                    const InputDistributions& dists) {
    cfg.validate();
    ch.validate();
    if (ch.n_rx != cfg.n_rx || ch.n_ris != cfg.n_ris)
        throw ValidationError("channel dimensions do not match system config");
    dists.validate(cfg);
}

std::vector<cplx> kron_with_block(std::span<const cplx> factor, std::span<const cplx> block) {
    std::vector<cplx> out(factor.size() * block.size());
    std::size_t idx = 0;
    for (const cplx& s : block)
        for (const cplx& f : factor) out[idx++] = f * s;
    return out;
}

int worker_count(const McSettings& mc) {
    if (mc.threads > 0) return mc.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

double u_value(int kind, const SystemConfig& cfg, const ChannelRealization& ch,
               std::span<const cplx> s1, std::span<const cplx> s2,
               std::span<const double> theta1, std::span<const double> theta2,
               std::span<const cplx> z) {
    if (kind < 1 || kind > 3) throw ValidationError("u kind must be 1, 2 or 3");
    const std::size_t dim = static_cast<std::size_t>(cfg.n_rx) *
                            static_cast<std::size_t>(cfg.block_len);
    if (z.size() != dim) throw ValidationError("z length must equal N*m");
    for (const cplx& v : z)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("z entry is not finite");
    const double root_p = std::sqrt(cfg.power);

    std::vector<cplx> shift(dim, cplx{0.0, 0.0});
    if (kind == 1) {
        std::vector<cplx> diff(s1.size());
        for (std::size_t q = 0; q < s1.size(); ++q) diff[q] = s1[q] - s2[q];
        shift = kron_with_block(effective_gain(ch, theta1), diff);
    } else if (kind == 2) {
        // H_ri * (e^{j theta1} - e^{j theta2}), then Kronecker with s1.
        std::vector<cplx> dphasor(theta1.size());
        for (std::size_t k = 0; k < theta1.size(); ++k)
            dphasor[k] = std::polar(1.0, theta1[k]) - std::polar(1.0, theta2[k]);
        std::vector<cplx> w(static_cast<std::size_t>(ch.n_rx));
        for (int r = 0; r < ch.n_rx; ++r) {
            cplx acc{0.0, 0.0};
            for (int c = 0; c < ch.n_ris; ++c) acc += ch.ri(r, c) * dphasor[static_cast<std::size_t>(c)];
            w[static_cast<std::size_t>(r)] = acc;
        }
        shift = kron_with_block(w, s1);
    } else {
        const auto x1 = kron_with_block(effective_gain(ch, theta1), s1);
        const auto x2 = kron_with_block(effective_gain(ch, theta2), s2);
        for (std::size_t q = 0; q < dim; ++q) shift[q] = x1[q] - x2[q];
    }

    double acc = 0.0;
    for (std::size_t q = 0; q < dim; ++q) acc += std::norm(z[q] + root_p * shift[q]);
    return -acc;
}

namespace detail {

double SignalSupport::cross(std::size_t o, std::size_t i) const {
    if (!cross2.empty()) return cross2[o * n_pairs() + i];
    double acc = 0.0;
    const cplx* xo = x.data() + o * dim;
    const cplx* xi = x.data() + i * dim;
    for (std::size_t q = 0; q < dim; ++q)
        acc += xo[q].real() * xi[q].real() + xo[q].imag() * xi[q].imag();
    return 2.0 * acc;
}

SignalSupport build_signal_support(const SystemConfig& cfg, const ChannelRealization& ch,
                                   const InputDistributions& dists) {
    SignalSupport sig;
    sig.dim = static_cast<std::size_t>(cfg.n_rx) * static_cast<std::size_t>(cfg.block_len);
    for (std::size_t b = 0; b < dists.p_s.size(); ++b) {
        if (dists.p_s[b] > 0.0) {
            sig.blocks.push_back(static_cast<std::uint32_t>(b));
            sig.wb.push_back(dists.p_s[b]);
        }
    }
    for (std::size_t a = 0; a < dists.p_theta.size(); ++a) {
        if (dists.p_theta[a] > 0.0) {
            sig.patterns.push_back(static_cast<std::uint32_t>(a));
            sig.wa.push_back(dists.p_theta[a]);
        }
    }

    const std::size_t pairs = sig.n_pairs();
    sig.x.resize(pairs * sig.dim);
    sig.norm2.resize(pairs);
    sig.wj.resize(pairs);
    const double root_p = std::sqrt(cfg.power);
    for (std::size_t ib = 0; ib < sig.n_blocks(); ++ib) {
        const auto block = cfg.block_symbols(sig.blocks[ib]);
        for (std::size_t ia = 0; ia < sig.n_patterns(); ++ia) {
            const auto gain = effective_gain(ch, cfg.pattern_angles(sig.patterns[ia]));
            const std::size_t pid = ib * sig.n_patterns() + ia;
            cplx* dst = sig.x.data() + pid * sig.dim;
            std::size_t idx = 0;
            double n2 = 0.0;
            for (int q = 0; q < cfg.block_len; ++q) {
                const cplx scaled = root_p * block[static_cast<std::size_t>(q)];
                for (int r = 0; r < cfg.n_rx; ++r) {
                    dst[idx] = gain[static_cast<std::size_t>(r)] * scaled;
                    n2 += std::norm(dst[idx]);
                    ++idx;
                }
            }
            sig.norm2[pid] = n2;
            sig.wj[pid] = sig.wb[ib] * sig.wa[ia];
        }
    }

    if (pairs <= SignalSupport::kCrossCap) {
        sig.cross2.resize(pairs * pairs);
        for (std::size_t o = 0; o < pairs; ++o) {
            for (std::size_t i = 0; i < pairs; ++i) {
                double acc = 0.0;
                const cplx* xo = sig.x.data() + o * sig.dim;
                const cplx* xi = sig.x.data() + i * sig.dim;
                for (std::size_t q = 0; q < sig.dim; ++q)
                    acc += xo[q].real() * xi[q].real() + xo[q].imag() * xi[q].imag();
                sig.cross2[o * pairs + i] = 2.0 * acc;
            }
        }
    }
    return sig;
}

namespace {

// Weighted log-sum-exp with max shift; weights are probabilities.
inline double lse(const double* u, const double* w, std::size_t n) {
    double umax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) umax = std::max(umax, u[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::exp(u[i] - umax);
    return umax + std::log(s);
}

}  // namespace

void cgf_sample_terms(const SignalSupport& sig, const cplx* z, double zn, unsigned mask,
                      CgfScratch& scratch, double out[3]) {
    const std::size_t pairs = sig.n_pairs();
    const std::size_t nb = sig.n_blocks();
    const std::size_t na = sig.n_patterns();
    scratch.a2re.resize(pairs);
    scratch.d.resize(pairs);
    scratch.u.resize(pairs);

    for (std::size_t pid = 0; pid < pairs; ++pid) {
        const cplx* xp = sig.x.data() + pid * sig.dim;
        double acc = 0.0;
        for (std::size_t q = 0; q < sig.dim; ++q)
            acc += z[q].real() * xp[q].real() + z[q].imag() * xp[q].imag();
        scratch.a2re[pid] = 2.0 * acc;
        scratch.d[pid] = sig.norm2[pid] - scratch.a2re[pid];
    }

    double sums[3] = {0.0, 0.0, 0.0};
    double* u = scratch.u.data();
    for (std::size_t ob = 0; ob < nb; ++ob) {
        for (std::size_t oa = 0; oa < na; ++oa) {
            const std::size_t o = ob * na + oa;
            const double w_o = sig.wj[o];
            const double c_o = zn + sig.norm2[o] + scratch.a2re[o];
            if (mask & 1u) {
                for (std::size_t ib = 0; ib < nb; ++ib) {
                    const std::size_t i = ib * na + oa;
                    u[ib] = -(c_o + scratch.d[i] - sig.cross(o, i));
                }
                sums[0] += w_o * lse(u, sig.wb.data(), nb);
            }
            if (mask & 2u) {
                for (std::size_t ia = 0; ia < na; ++ia) {
                    const std::size_t i = ob * na + ia;
                    u[ia] = -(c_o + scratch.d[i] - sig.cross(o, i));
                }
                sums[1] += w_o * lse(u, sig.wa.data(), na);
            }
            if (mask & 4u) {
                if (!sig.cross2.empty()) {
                    const double* row = sig.cross2.data() + o * pairs;
                    for (std::size_t i = 0; i < pairs; ++i)
                        u[i] = -(c_o + scratch.d[i] - row[i]);
                } else {
                    for (std::size_t i = 0; i < pairs; ++i)
                        u[i] = -(c_o + scratch.d[i] - sig.cross(o, i));
                }
                sums[2] += w_o * lse(u, sig.wj.data(), pairs);
            }
        }
    }
    for (int k = 0; k < 3; ++k) out[k] = sums[k] / kLn2;
}

void run_cgf_samples(const SignalSupport& sig, const McSettings& mc, unsigned mask,
                     std::array<std::vector<double>, 3>& terms, std::vector<double>& zn) {
    const std::size_t n = mc.noise_samples;
    for (int k = 0; k < 3; ++k) {
        if (mask & (1u << k))
            terms[static_cast<std::size_t>(k)].resize(n);
        else
            terms[static_cast<std::size_t>(k)].clear();
    }
    zn.resize(n);

    const CounterRng rng(mc.seed, rng_stream::kNoise);
    std::atomic<std::int64_t> first_bad{-1};

    auto work = [&](std::size_t begin, std::size_t end) {
        detail::CgfScratch scratch;
        scratch.z.resize(sig.dim);
        double out[3];
        for (std::size_t t = begin; t < end; ++t) {
            rng.gaussian_vector(t, scratch.z);
            double z2 = 0.0;
            for (const cplx& v : scratch.z) z2 += std::norm(v);
            zn[t] = z2;
            cgf_sample_terms(sig, scratch.z.data(), z2, mask, scratch, out);
            for (int k = 0; k < 3; ++k) {
                if (!(mask & (1u << k))) continue;
                if (!std::isfinite(out[k])) {
                    std::int64_t expected = -1;
                    first_bad.compare_exchange_strong(expected, static_cast<std::int64_t>(t));
                    return;
                }
                terms[static_cast<std::size_t>(k)][t] = out[k];
            }
        }
    };

    const int nt = std::min<int>(worker_count(mc), static_cast<int>(std::max<std::size_t>(n, 1)));
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
        throw NumericalError("non-finite CGF term at noise sample " +
                             std::to_string(first_bad.load()));
}

}  // namespace detail

namespace {

std::array<CgfEstimate, 3> estimate_cgfs(const SystemConfig& cfg, const ChannelRealization& ch,
                                         const InputDistributions& dists, const McSettings& mc,
                                         unsigned mask) {
    check_instance(cfg, ch, dists);
    mc.validate();
    const auto sig = detail::build_signal_support(cfg, ch, dists);

    std::array<std::vector<double>, 3> terms;
    std::vector<double> zn;
    detail::run_cgf_samples(sig, mc, mask, terms, zn);

    const double mult = ci_multiplier(mc.ci_level);
    std::array<CgfEstimate, 3> out;
    std::vector<double> resid(mc.noise_samples);
    for (int k = 0; k < 3; ++k) {
        if (!(mask & (1u << k))) continue;
        const auto& l = terms[static_cast<std::size_t>(k)];
        const MeanVar mv = mean_and_std_err(l);
        CgfEstimate est;
        est.kappa_bits = mv.mean;
        est.std_err = mv.std_err;
        est.ci_halfwidth = mult * mv.std_err;
        est.samples = mc.noise_samples;
        for (std::size_t t = 0; t < l.size(); ++t) resid[t] = l[t] + zn[t] * kLog2E;
        est.resid_std_err = mean_and_std_err(resid).std_err;
        out[static_cast<std::size_t>(k)] = est;
    }
    return out;
}

}  // namespace

CgfEstimate conditional_cgf(int kind, const SystemConfig& cfg, const ChannelRealization& ch,
                            const InputDistributions& dists, const McSettings& mc) {
    if (kind < 1 || kind > 3) throw ValidationError("u kind must be 1, 2 or 3");
    return estimate_cgfs(cfg, ch, dists, mc, 1u << (kind - 1))[static_cast<std::size_t>(kind - 1)];
}

RateBounds rate_bounds(const SystemConfig& cfg, const ChannelRealization& ch,
                       const InputDistributions& dists, const McSettings& mc) {
    const auto est = estimate_cgfs(cfg, ch, dists, mc, 0x7u);
    const double base = -static_cast<double>(cfg.n_rx) * kLog2E;
    const double inv_m = 1.0 / static_cast<double>(cfg.block_len);
    RateBounds rb;
    rb.b1 = base - inv_m * est[0].kappa_bits;
    rb.b2 = base - inv_m * est[1].kappa_bits;
    rb.b12 = base - inv_m * est[2].kappa_bits;
    rb.ci1 = inv_m * est[0].ci_halfwidth;
    rb.ci2 = inv_m * est[1].ci_halfwidth;
    rb.ci12 = inv_m * est[2].ci_halfwidth;
    rb.se1 = inv_m * est[0].std_err;
    rb.se2 = inv_m * est[1].std_err;
    rb.se12 = inv_m * est[2].std_err;
    rb.resid_se1 = inv_m * est[0].resid_std_err;
    rb.resid_se2 = inv_m * est[1].resid_std_err;
    rb.resid_se12 = inv_m * est[2].resid_std_err;
    return rb;
}

MutualInfoEstimate mutual_info_oracle(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const InputDistributions& dists, std::size_t samples,
                                      std::uint64_t seed) {
    check_instance(cfg, ch, dists);
    if (samples < 100) throw ValidationError("oracle needs at least 100 samples");
    const std::size_t dim = static_cast<std::size_t>(cfg.n_rx) *
                            static_cast<std::size_t>(cfg.block_len);
    const std::size_t n_blocks = cfg.block_count();
    const std::size_t n_patterns = cfg.pattern_count();
    if (dim > 2 || n_blocks * n_patterns > 64)
        throw ValidationError("mutual-information oracle accepts only tiny instances "
                              "(N*m <= 2 and S^m * A^K <= 64)");

    // Full alphabet table of noiseless points: the mixture densities need
    // every hypothesis with its weight.
    std::vector<cplx> points(n_blocks * n_patterns * dim);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const auto block = cfg.block_symbols(b);
        for (std::size_t a = 0; a < n_patterns; ++a) {
            const auto y = noiseless_output(cfg, ch, block, cfg.pattern_angles(a));
            std::copy(y.begin(), y.end(),
                      points.begin() + static_cast<std::ptrdiff_t>((b * n_patterns + a) * dim));
        }
    }

    const CounterRng rng_in(seed, rng_stream::kOracleInputs);
    const CounterRng rng_noise(seed, rng_stream::kOracleNoise);
    const double inv_m_ln2 = 1.0 / (kLn2 * static_cast<double>(cfg.block_len));

    // Log densities up to the common Gaussian normalizer, which cancels in
    // every ratio below.
    std::vector<cplx> y(dim);
    std::vector<double> logp(n_blocks * n_patterns);
    std::vector<double> t1(samples), t2(samples), t12(samples);
    auto logsum = [](const std::vector<double>& v) {
        double m = -std::numeric_limits<double>::infinity();
        for (double x : v) m = std::max(m, x);
        double s = 0.0;
        for (double x : v) s += std::exp(x - m);
        return m + std::log(s);
    };

    std::vector<double> row(std::max(n_blocks, n_patterns));
    for (std::size_t t = 0; t < samples; ++t) {
        const std::size_t b1 = rng_in.categorical(2 * t, dists.p_s);
        const std::size_t a1 = rng_in.categorical(2 * t + 1, dists.p_theta);
        rng_noise.gaussian_vector(t, y);
        const cplx* sent = points.data() + (b1 * n_patterns + a1) * dim;
        for (std::size_t q = 0; q < dim; ++q) y[q] += sent[q];

        for (std::size_t b = 0; b < n_blocks; ++b) {
            for (std::size_t a = 0; a < n_patterns; ++a) {
                const cplx* xp = points.data() + (b * n_patterns + a) * dim;
                double d2 = 0.0;
                for (std::size_t q = 0; q < dim; ++q) d2 += std::norm(y[q] - xp[q]);
                logp[b * n_patterns + a] = -d2;
            }
        }
        const double num = logp[b1 * n_patterns + a1];

        // p(y | theta1): mix over symbol blocks.
        row.assign(n_blocks, -std::numeric_limits<double>::infinity());
        for (std::size_t b = 0; b < n_blocks; ++b)
            if (dists.p_s[b] > 0.0) row[b] = std::log(dists.p_s[b]) + logp[b * n_patterns + a1];
        const double den1 = logsum(row);

        // p(y | s1): mix over phase patterns.
        row.assign(n_patterns, -std::numeric_limits<double>::infinity());
        for (std::size_t a = 0; a < n_patterns; ++a)
            if (dists.p_theta[a] > 0.0)
                row[a] = std::log(dists.p_theta[a]) + logp[b1 * n_patterns + a];
        const double den2 = logsum(row);

        // p(y): mix over both.
        std::vector<double> all;
        all.reserve(n_blocks * n_patterns);
        for (std::size_t b = 0; b < n_blocks; ++b)
            for (std::size_t a = 0; a < n_patterns; ++a)
                if (dists.p_s[b] > 0.0 && dists.p_theta[a] > 0.0)
                    all.push_back(std::log(dists.p_s[b] * dists.p_theta[a]) +
                                  logp[b * n_patterns + a]);
        const double den12 = logsum(all);

        t1[t] = (num - den1) * inv_m_ln2;
        t2[t] = (num - den2) * inv_m_ln2;
        t12[t] = (num - den12) * inv_m_ln2;
    }

    MutualInfoEstimate est;
    const MeanVar m1 = mean_and_std_err(t1);
    const MeanVar m2 = mean_and_std_err(t2);
    const MeanVar m12 = mean_and_std_err(t12);
    est.i1 = m1.mean;
    est.i2 = m2.mean;
    est.i12 = m12.mean;
    est.se1 = m1.std_err;
    est.se2 = m2.std_err;
    est.se12 = m12.std_err;
    est.samples = samples;
    return est;
}

}  // namespace rismac
