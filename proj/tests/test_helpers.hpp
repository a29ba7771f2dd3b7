#pragma once

#include <random>
#include <vector>

#include "rismac/channel.hpp"
#include "rismac/system.hpp"

namespace rismac::testing {

/// Continuous-phase channel draw with unit direct-path amplitude and
/// reflected amplitude alpha.
inline ChannelRealization random_phase_channel(int n_rx, int n_ris, double alpha,
                                               std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::vector<std::vector<double>> ri(static_cast<std::size_t>(n_rx),
                                        std::vector<double>(static_cast<std::size_t>(n_ris)));
    std::vector<double> d(static_cast<std::size_t>(n_rx));
    for (auto& row : ri)
        for (double& p : row) p = phase(gen);
    for (double& p : d) p = phase(gen);
    return build_channel_polar(alpha, ri, d);
}

inline SystemConfig small_config(int n_rx, int n_ris, int block_len, double power,
                                 Constellation con, int phases) {
    SystemConfig cfg;
    cfg.n_rx = n_rx;
    cfg.n_ris = n_ris;
    cfg.block_len = block_len;
    cfg.power = power;
    cfg.constellation = std::move(con);
    cfg.phase_set = PhaseSet(phases);
    return cfg;
}

}  // namespace rismac::testing
