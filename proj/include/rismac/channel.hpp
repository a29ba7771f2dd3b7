#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rismac/common.hpp"
#include "rismac/system.hpp"

namespace rismac {

/// One quasi-static channel draw: the combined reflected path H_ri (N x K,
/// row-major) and the direct path h_d (length N).
struct ChannelRealization {
    int n_rx = 0;
    int n_ris = 0;
    std::vector<cplx> h_ri;  // row-major N x K
    std::vector<cplx> h_d;   // length N

    const cplx& ri(int row, int col) const {
        return h_ri[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_ris) +
                    static_cast<std::size_t>(col)];
    }
    void validate() const;
    bool reflected_path_is_zero() const;
    /// FNV-1a fingerprint of the full-precision entries, for run metadata.
    std::uint64_t hash() const;
};

/// Build a channel from polar data: reflected entries alpha*e^{j*phase},
/// direct entries 1*e^{j*phase}. phases_ri is row-major N x K.
ChannelRealization build_channel_polar(double alpha,
                                       const std::vector<std::vector<double>>& phases_ri,
                                       const std::vector<double>& phases_d);

/// Same, with explicit per-entry amplitudes instead of a single scalar.
ChannelRealization build_channel_polar(const std::vector<std::vector<double>>& amplitudes_ri,
                                       const std::vector<std::vector<double>>& phases_ri,
                                       const std::vector<double>& amplitudes_d,
                                       const std::vector<double>& phases_d);

/// Effective gain g(theta) = H_ri * e^{j*theta} + h_d, length N.
std::vector<cplx> effective_gain(const ChannelRealization& ch, std::span<const double> theta);

/// Noiseless received vector sqrt(P) * g(theta)^{m (x)} * s, length N*m:
/// block q of length N equals sqrt(P) * g(theta) * s[q].
std::vector<cplx> noiseless_output(const SystemConfig& cfg, const ChannelRealization& ch,
                                   std::span<const cplx> symbol_block,
                                   std::span<const double> theta);

struct InjectivityReport {
    bool injective = false;
    double min_pairwise_distance = 0.0;
    /// Present when a collision at or below tol was found: the two
    /// (block index, pattern index) input pairs with the closest outputs.
    std::optional<std::array<std::size_t, 4>> colliding_pair;
    std::size_t inputs_checked = 0;
};

/// Enumerates all (s, theta) inputs and tests whether the noiseless outputs
/// are pairwise separated by more than tol. Refuses when S^m * A^K exceeds
/// the per-alphabet enumeration cap.
InjectivityReport check_injectivity(const SystemConfig& cfg, const ChannelRealization& ch,
                                    double tol);

/// Scale-aware default separation tolerance.
double default_injectivity_tol(double power);

/// Load / save the channel-file schema (strict JSON: alpha, phases_ri,
/// phases_d, optional amplitudes_ri / amplitudes_d; unknown keys rejected).
ChannelRealization load_channel_file(const std::string& path);
ChannelRealization channel_from_json_text(const std::string& text);
std::string channel_to_json_text(const ChannelRealization& ch);

}  // namespace rismac
