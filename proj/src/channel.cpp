#include "rismac/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rismac {

void ChannelRealization::validate() const {
    if (n_rx < 1 || n_ris < 1) throw ValidationError("channel dimensions must be positive");
    if (h_ri.size() != static_cast<std::size_t>(n_rx) * static_cast<std::size_t>(n_ris))
        throw ValidationError("h_ri size does not match N x K");
    if (h_d.size() != static_cast<std::size_t>(n_rx))
        throw ValidationError("h_d size does not match N");
    for (const cplx& v : h_ri)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("h_ri entry is not finite");
    for (const cplx& v : h_d)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("h_d entry is not finite");
}

bool ChannelRealization::reflected_path_is_zero() const {
    return std::all_of(h_ri.begin(), h_ri.end(), [](const cplx& v) { return v == cplx{0.0, 0.0}; });
}

std::uint64_t ChannelRealization::hash() const {
    std::uint64_t h = fnv1a(&n_rx, sizeof(n_rx));
    h = fnv1a(&n_ris, sizeof(n_ris), h);
    auto mix = [&h](const std::vector<cplx>& v) {
        for (const cplx& x : v) {
            const double re = x.real(), im = x.imag();
            h = fnv1a(&re, sizeof(re), h);
            h = fnv1a(&im, sizeof(im), h);
        }
    };
    mix(h_ri);
    mix(h_d);
    return h;
}

ChannelRealization build_channel_polar(double alpha,
                                       const std::vector<std::vector<double>>& phases_ri,
                                       const std::vector<double>& phases_d) {
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    const std::size_t n = phases_ri.size();
    const std::size_t k = n ? phases_ri.front().size() : 0;
    std::vector<std::vector<double>> amp_ri(n, std::vector<double>(k, alpha));
    std::vector<double> amp_d(phases_d.size(), 1.0);
    return build_channel_polar(amp_ri, phases_ri, amp_d, phases_d);
}

ChannelRealization build_channel_polar(const std::vector<std::vector<double>>& amplitudes_ri,
                                       const std::vector<std::vector<double>>& phases_ri,
                                       const std::vector<double>& amplitudes_d,
                                       const std::vector<double>& phases_d) {
    const std::size_t n = phases_ri.size();
    if (n == 0 || phases_ri.front().empty())
        throw ValidationError("phases_ri must be a nonempty N x K matrix");
    const std::size_t k = phases_ri.front().size();
    if (amplitudes_ri.size() != n) throw ValidationError("amplitudes_ri row count mismatch");
    if (phases_d.size() != n) throw ValidationError("phases_d length must equal row count of phases_ri");
    if (amplitudes_d.size() != n) throw ValidationError("amplitudes_d length mismatch");

    ChannelRealization ch;
    ch.n_rx = static_cast<int>(n);
    ch.n_ris = static_cast<int>(k);
    ch.h_ri.resize(n * k);
    ch.h_d.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (phases_ri[r].size() != k || amplitudes_ri[r].size() != k)
            throw ValidationError("phases_ri rows must all have length K");
        for (std::size_t c = 0; c < k; ++c) {
            if (!(amplitudes_ri[r][c] >= 0.0)) throw ValidationError("amplitude must be >= 0");
            ch.h_ri[r * k + c] = std::polar(amplitudes_ri[r][c], phases_ri[r][c]);
        }
        if (!(amplitudes_d[r] >= 0.0)) throw ValidationError("amplitude must be >= 0");
        ch.h_d[r] = std::polar(amplitudes_d[r], phases_d[r]);
    }
    ch.validate();
    return ch;
}

std::vector<cplx> effective_gain(const ChannelRealization& ch, std::span<const double> theta) {
    if (theta.size() != static_cast<std::size_t>(ch.n_ris))
        throw ValidationError("theta length must equal K");
    std::vector<cplx> phasor(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) phasor[k] = std::polar(1.0, theta[k]);

    std::vector<cplx> g(static_cast<std::size_t>(ch.n_rx));
    for (int r = 0; r < ch.n_rx; ++r) {
        cplx acc = ch.h_d[static_cast<std::size_t>(r)];
        for (int c = 0; c < ch.n_ris; ++c) acc += ch.ri(r, c) * phasor[static_cast<std::size_t>(c)];
        g[static_cast<std::size_t>(r)] = acc;
    }
    return g;
}

std::vector<cplx> noiseless_output(const SystemConfig& cfg, const ChannelRealization& ch,
                                   std::span<const cplx> symbol_block,
                                   std::span<const double> theta) {
    if (symbol_block.size() != static_cast<std::size_t>(cfg.block_len))
        throw ValidationError("symbol block length must equal m");
    const auto g = effective_gain(ch, theta);
    const double root_p = std::sqrt(cfg.power);
    std::vector<cplx> out(static_cast<std::size_t>(cfg.n_rx) *
                          static_cast<std::size_t>(cfg.block_len));
    std::size_t idx = 0;
    for (int q = 0; q < cfg.block_len; ++q) {
        const cplx scaled = root_p * symbol_block[static_cast<std::size_t>(q)];
        for (int r = 0; r < cfg.n_rx; ++r) out[idx++] = g[static_cast<std::size_t>(r)] * scaled;
    }
    return out;
}

InjectivityReport check_injectivity(const SystemConfig& cfg, const ChannelRealization& ch,
                                    double tol) {
    cfg.validate();
    ch.validate();
    if (ch.n_rx != cfg.n_rx || ch.n_ris != cfg.n_ris)
        throw ValidationError("channel dimensions do not match system config");

    const std::size_t n_blocks = cfg.block_count();
    const std::size_t n_patterns = cfg.pattern_count();
    const std::size_t total = n_blocks * n_patterns;
    if (total > cfg.enumeration_cap)
        throw ValidationError("injectivity check refused: S^m * A^K = " + std::to_string(total) +
                              " inputs exceed enumeration cap " +
                              std::to_string(cfg.enumeration_cap));

    const std::size_t dim = static_cast<std::size_t>(cfg.n_rx) *
                            static_cast<std::size_t>(cfg.block_len);
    std::vector<cplx> outputs(total * dim);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const auto block = cfg.block_symbols(b);
        for (std::size_t a = 0; a < n_patterns; ++a) {
            const auto angles = cfg.pattern_angles(a);
            const auto y = noiseless_output(cfg, ch, block, angles);
            std::copy(y.begin(), y.end(), outputs.begin() +
                                              static_cast<std::ptrdiff_t>((b * n_patterns + a) * dim));
        }
    }

    InjectivityReport rep;
    rep.inputs_checked = total;
    rep.min_pairwise_distance = std::numeric_limits<double>::infinity();
    std::size_t arg_i = 0, arg_j = 0;
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = i + 1; j < total; ++j) {
            double d2 = 0.0;
            for (std::size_t q = 0; q < dim; ++q)
                d2 += std::norm(outputs[i * dim + q] - outputs[j * dim + q]);
            const double d = std::sqrt(d2);
            if (d < rep.min_pairwise_distance) {
                rep.min_pairwise_distance = d;
                arg_i = i;
                arg_j = j;
            }
        }
    }
    if (total < 2) rep.min_pairwise_distance = 0.0;
    rep.injective = rep.min_pairwise_distance > tol;
    if (!rep.injective && total >= 2) {
        rep.colliding_pair = std::array<std::size_t, 4>{arg_i / n_patterns, arg_i % n_patterns,
                                                        arg_j / n_patterns, arg_j % n_patterns};
    }
    return rep;
}

double default_injectivity_tol(double power) { return 1e-9 * std::sqrt(power); }

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ValidationError("unknown key '" + it.key() + "' in " + where);
    }
}

std::vector<std::vector<double>> matrix_field(const json& j, const char* key) {
    std::vector<std::vector<double>> out;
    for (const auto& row : j.at(key)) out.push_back(row.get<std::vector<double>>());
    return out;
}

}  // namespace

ChannelRealization channel_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("channel file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.is_object()) throw ValidationError("channel file must be a JSON object");
        reject_unknown_keys(j, {"alpha", "phases_ri", "phases_d", "amplitudes_ri", "amplitudes_d"},
                            "channel file");
        if (!j.contains("phases_ri") || !j.contains("phases_d"))
            throw ValidationError("channel file needs phases_ri and phases_d");
        const auto phases_ri = matrix_field(j, "phases_ri");
        const auto phases_d = j.at("phases_d").get<std::vector<double>>();

        if (j.contains("amplitudes_ri") || j.contains("amplitudes_d")) {
            std::vector<std::vector<double>> amp_ri;
            if (j.contains("amplitudes_ri")) {
                amp_ri = matrix_field(j, "amplitudes_ri");
            } else {
                const double alpha = j.value("alpha", 1.0);
                amp_ri.assign(phases_ri.size(),
                              std::vector<double>(phases_ri.empty() ? 0 : phases_ri.front().size(),
                                                  alpha));
            }
            std::vector<double> amp_d(phases_d.size(), 1.0);
            if (j.contains("amplitudes_d")) amp_d = j.at("amplitudes_d").get<std::vector<double>>();
            return build_channel_polar(amp_ri, phases_ri, amp_d, phases_d);
        }

        if (!j.contains("alpha")) throw ValidationError("channel file needs alpha or amplitudes_ri");
        return build_channel_polar(j.at("alpha").get<double>(), phases_ri, phases_d);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed channel file: ") + e.what());
    }
}

ChannelRealization load_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open channel file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return channel_from_json_text(ss.str());
}

std::string channel_to_json_text(const ChannelRealization& ch) {
    nlohmann::json j;
    std::vector<std::vector<double>> amp(static_cast<std::size_t>(ch.n_rx)),
        ph(static_cast<std::size_t>(ch.n_rx));
    for (int r = 0; r < ch.n_rx; ++r) {
        for (int c = 0; c < ch.n_ris; ++c) {
            amp[static_cast<std::size_t>(r)].push_back(std::abs(ch.ri(r, c)));
            ph[static_cast<std::size_t>(r)].push_back(std::arg(ch.ri(r, c)));
        }
    }
    std::vector<double> amp_d, ph_d;
    for (const cplx& v : ch.h_d) {
        amp_d.push_back(std::abs(v));
        ph_d.push_back(std::arg(v));
    }
    j["amplitudes_ri"] = amp;
    j["phases_ri"] = ph;
    j["amplitudes_d"] = amp_d;
    j["phases_d"] = ph_d;
    return j.dump(2);
}

}  // namespace rismac
