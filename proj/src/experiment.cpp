#include "rismac/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace rismac {

namespace {

using nlohmann::ordered_json;

constexpr double kDbToLinear = 0.1;

double db_to_linear(double db) { return std::pow(10.0, db * kDbToLinear); }

const std::vector<std::vector<double>> kFig2PhasesRi = {
    {1.11, 0.71, 2.92, -2.29},
    {2.52, -0.72, 2.21, 2.1},
};
const std::vector<double> kFig2PhasesD = {3.11, 1.39};

const std::vector<std::vector<double>> kFig3PhasesRi = {
    {-2.63, -1.22, -2.92, -1.52},
    {1.85, 0.36, -0.87, -2.59},
};
const std::vector<double> kFig3PhasesD = {2.82, 2.32};

ExperimentSpec make_fig2(const std::string& name, double alpha) {
    ExperimentSpec spec;
    spec.name = name;
    spec.system.n_rx = 2;
    spec.system.n_ris = 4;
    spec.system.block_len = 2;
    spec.power_db = -20.0;
    spec.system.power = db_to_linear(spec.power_db);
    spec.system.constellation = Constellation::bpsk();
    spec.system.phase_set = PhaseSet(2);
    spec.channel = build_channel_polar(alpha, kFig2PhasesRi, kFig2PhasesD);
    spec.mc.seed = 20200824;
    spec.mc.noise_samples = 100000;
    spec.output_dir = "out/" + name;
    return spec;
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ValidationError("unknown key '" + it.key() + "' in " + where);
    }
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file: " + path.string());
    out << text;
}

ordered_json bounds_json(const RateBounds& rb) {
    ordered_json j;
    j["b1"] = rb.b1;
    j["b2"] = rb.b2;
    j["b12"] = rb.b12;
    j["ci1"] = rb.ci1;
    j["ci2"] = rb.ci2;
    j["ci12"] = rb.ci12;
    return j;
}

ordered_json meta_header(const ExperimentSpec& spec, const char* command) {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["name"] = spec.name;
    j["seed"] = spec.mc.seed;
    j["noise_samples"] = spec.mc.noise_samples;
    j["ci_level"] = spec.mc.ci_level;
    j["power_db"] = spec.power_db;
    j["channel_hash"] = hash_hex(spec.channel.hash());
    ordered_json sys;
    sys["n_rx"] = spec.system.n_rx;
    sys["n_ris"] = spec.system.n_ris;
    sys["block_len"] = spec.system.block_len;
    sys["constellation"] = spec.system.constellation.label();
    sys["phase_count"] = spec.system.phase_set.count();
    j["system"] = sys;
    ordered_json strat;
    strat["kind"] = SearchStrategy::kind_name(spec.strategy.kind);
    strat["iters"] = spec.strategy.ascent_iters;
    strat["random_draws"] = spec.strategy.random_draws;
    strat["search_samples"] = spec.strategy.search_samples;
    if (spec.strategy.kind == SearchStrategy::Kind::weighted_sum_ascent)
        strat["weights"] = spec.strategy.effective_weights();
    j["strategy"] = strat;
    return j;
}

InputDistributions effective_dists(const ExperimentSpec& spec) {
    return spec.distributions ? *spec.distributions : uniform_distributions(spec.system);
}

}  // namespace

void ExperimentSpec::validate() const {
    system.validate();
    channel.validate();
    if (channel.n_rx != system.n_rx || channel.n_ris != system.n_ris)
        throw ValidationError("channel dimensions do not match system config");
    mc.validate();
    if (distributions) distributions->validate(system);
    if (name.empty()) throw ValidationError("experiment needs a name");
}

std::vector<std::string> builtin_spec_names() {
    return {"fig2-alpha1", "fig2-alpha05", "fig2-noris", "fig3"};
}

ExperimentSpec builtin_spec(const std::string& name) {
    if (name == "fig2-alpha1") return make_fig2(name, 1.0);
    if (name == "fig2-alpha05") return make_fig2(name, 0.5);
    if (name == "fig2-noris") return make_fig2(name, 0.0);
    if (name == "fig3") {
        ExperimentSpec spec;
        spec.name = name;
        spec.system.n_rx = 2;
        spec.system.n_ris = 4;
        spec.system.block_len = 1;
        spec.power_db = 40.0;
        spec.system.power = db_to_linear(spec.power_db);
        spec.system.constellation = Constellation::ask4();
        spec.system.phase_set = PhaseSet(2);
        spec.channel = build_channel_polar(1.0, kFig3PhasesRi, kFig3PhasesD);
        spec.mc.seed = 20200824;
        spec.mc.noise_samples = 100000;
        spec.output_dir = "out/" + name;
        return spec;
    }
    throw ValidationError("unknown builtin spec: " + name);
}

ExperimentSpec spec_from_json_text(const std::string& text, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("spec file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.is_object()) throw ValidationError("spec file must be a JSON object");
        reject_unknown_keys(
            j, {"name", "system", "channel", "mc", "strategy", "distributions", "outputs"},
            "spec file");

        ExperimentSpec spec;
        spec.name = j.at("name").get<std::string>();

        const auto& sys = j.at("system");
        reject_unknown_keys(sys,
                            {"n_rx", "n_ris", "block_len", "power_db", "constellation",
                             "phase_count", "phases", "enumeration_cap"},
                            "system");
        spec.system.n_rx = sys.at("n_rx").get<int>();
        spec.system.n_ris = sys.at("n_ris").get<int>();
        spec.system.block_len = sys.at("block_len").get<int>();
        spec.power_db = sys.at("power_db").get<double>();
        spec.system.power = db_to_linear(spec.power_db);
        if (sys.contains("enumeration_cap"))
            spec.system.enumeration_cap = sys.at("enumeration_cap").get<std::size_t>();

        const auto& con = sys.at("constellation");
        if (con.is_string()) {
            spec.system.constellation = Constellation::from_name(con.get<std::string>());
        } else {
            reject_unknown_keys(con, {"points", "label"}, "constellation");
            std::vector<cplx> pts;
            for (const auto& p : con.at("points")) {
                if (!p.is_array() || p.size() != 2)
                    throw ValidationError("constellation points must be [re, im] pairs");
                pts.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
            spec.system.constellation = Constellation(pts, con.value("label", "custom"));
        }

        if (sys.contains("phases")) {
            spec.system.phase_set = PhaseSet(sys.at("phases").get<std::vector<double>>());
            if (sys.contains("phase_count") &&
                sys.at("phase_count").get<int>() != spec.system.phase_set.count())
                throw ValidationError("phase_count disagrees with the phases list");
        } else {
            spec.system.phase_set = PhaseSet(sys.at("phase_count").get<int>());
        }

        const auto& chan = j.at("channel");
        if (chan.is_object() && chan.contains("file")) {
            reject_unknown_keys(chan, {"file"}, "channel");
            std::filesystem::path p = chan.at("file").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            spec.channel = load_channel_file(p.string());
        } else {
            spec.channel = channel_from_json_text(chan.dump());
        }

        if (j.contains("mc")) {
            const auto& mc = j.at("mc");
            reject_unknown_keys(mc, {"seed", "noise_samples", "ci_level", "threads"}, "mc");
            spec.mc.seed = mc.value("seed", spec.mc.seed);
            spec.mc.noise_samples = mc.value("noise_samples", spec.mc.noise_samples);
            spec.mc.ci_level = mc.value("ci_level", spec.mc.ci_level);
            spec.mc.threads = mc.value("threads", spec.mc.threads);
        }

        if (j.contains("strategy")) {
            const auto& st = j.at("strategy");
            reject_unknown_keys(st, {"kind", "weights", "iters", "search_samples", "random_draws"},
                                "strategy");
            spec.strategy.kind = SearchStrategy::kind_from_name(st.at("kind").get<std::string>());
            if (st.contains("weights"))
                spec.strategy.weights = st.at("weights").get<std::vector<double>>();
            spec.strategy.ascent_iters = st.value("iters", spec.strategy.ascent_iters);
            spec.strategy.search_samples =
                st.value("search_samples", spec.strategy.search_samples);
            spec.strategy.random_draws = st.value("random_draws", spec.strategy.random_draws);
        }

        if (j.contains("distributions")) {
            const auto& d = j.at("distributions");
            reject_unknown_keys(d, {"p_s", "p_theta"}, "distributions");
            InputDistributions dists;
            dists.p_s = d.at("p_s").get<std::vector<double>>();
            dists.p_theta = d.at("p_theta").get<std::vector<double>>();
            spec.distributions = std::move(dists);
        }

        if (j.contains("outputs")) spec.output_dir = j.at("outputs").get<std::string>();
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed spec file: ") + e.what());
    }
}

ExperimentSpec load_spec(const std::string& name_or_path) {
    for (const std::string& b : builtin_spec_names())
        if (b == name_or_path) return builtin_spec(name_or_path);
    std::ifstream in(name_or_path);
    if (!in)
        throw ValidationError("'" + name_or_path +
                              "' is neither a builtin spec nor a readable file");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string base = std::filesystem::path(name_or_path).parent_path().string();
    ExperimentSpec spec = spec_from_json_text(ss.str(), base.empty() ? "." : base);
    return spec;
}

void cmd_region(const ExperimentSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();

    SearchStrategy strategy = spec.strategy;
    if (spec.distributions)
        strategy.extra_candidates.emplace_back(*spec.distributions, "spec");

    const SearchResult search = search_distributions(spec.system, spec.channel, spec.mc, strategy);
    const RegionPolygon hull = region_union_hull(search.pentagons);

    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

    std::filesystem::create_directories(spec.output_dir);
    const std::filesystem::path dir(spec.output_dir);

    std::ostringstream region_csv;
    region_csv << "R2,R1\n";
    for (const RatePoint& v : hull.vertices)
        region_csv << format_full(v.r2) << "," << format_full(v.r1) << "\n";
    write_text_file(dir / "region.csv", region_csv.str());

    std::ostringstream pent_csv;
    pent_csv << "label,b1,b2,b12,ci1,ci2,ci12\n";
    for (const RatePentagon& p : search.pentagons) {
        pent_csv << p.label << "," << format_full(p.b1) << "," << format_full(p.b2) << ","
                 << format_full(p.b12) << "," << format_full(p.bounds.ci1) << ","
                 << format_full(p.bounds.ci2) << "," << format_full(p.bounds.ci12) << "\n";
    }
    write_text_file(dir / "pentagons.csv", pent_csv.str());

    ordered_json meta = meta_header(spec, "region");
    meta["skipped_candidates"] = search.skipped;
    meta["hull_area"] = hull.area();
    ordered_json pents = ordered_json::array();
    for (const RatePentagon& p : search.pentagons) {
        ordered_json pj;
        pj["label"] = p.label;
        pj["bounds"] = bounds_json(p.bounds);
        pj["p_s"] = p.dists.p_s;
        pj["p_theta"] = p.dists.p_theta;
        pents.push_back(pj);
    }
    meta["pentagons"] = pents;
    meta["wall_time_ms"] = wall_ms;
    write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

void cmd_asymptotics_high(const ExperimentSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto [r1_max, r2_max] = high_power_rectangle(spec.system);

    // Power sweep with uniform (or spec) inputs, to expose the approach to
    // the rectangle.
    const InputDistributions dists = effective_dists(spec);
    std::vector<double> sweep_db = {10.0, 20.0, 30.0, 40.0};
    ordered_json sweep = ordered_json::array();
    bool nondecreasing = true;
    double prev_b1 = -1e300, prev_b2 = -1e300, prev_ci1 = 0.0, prev_ci2 = 0.0;
    for (double db : sweep_db) {
        SystemConfig sys = spec.system;
        sys.power = db_to_linear(db);
        const RateBounds rb = rate_bounds(sys, spec.channel, dists, spec.mc);
        ordered_json row;
        row["power_db"] = db;
        row["bounds"] = bounds_json(rb);
        sweep.push_back(row);
        if (rb.b1 + rb.ci1 + prev_ci1 < prev_b1 || rb.b2 + rb.ci2 + prev_ci2 < prev_b2)
            nondecreasing = false;
        prev_b1 = rb.b1;
        prev_b2 = rb.b2;
        prev_ci1 = rb.ci1;
        prev_ci2 = rb.ci2;
    }

    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    std::filesystem::create_directories(spec.output_dir);

    ordered_json out = meta_header(spec, "asymptotics-high");
    out["r1_max"] = r1_max;
    out["r2_max"] = r2_max;
    out["sweep"] = sweep;
    out["sweep_nondecreasing_within_ci"] = nondecreasing;
    out["wall_time_ms"] = wall_ms;
    write_text_file(std::filesystem::path(spec.output_dir) / "highpower.json",
                    out.dump(2) + "\n");
}

void cmd_asymptotics_low(const ExperimentSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    if (spec.system.n_rx != 1 || spec.system.block_len != 1)
        throw ValidationError("low-power mode needs a spec with n_rx = 1 and block_len = 1");

    const InputDistributions dists = effective_dists(spec);
    const auto corners = corner_points(spec.system, spec.channel);
    const auto bf = beamforming_argmax(spec.system, spec.channel);
    const auto rates = low_power_region(spec.system, spec.channel, dists);

    McSettings grad_mc = spec.mc;
    grad_mc.noise_samples = std::max<std::size_t>(spec.mc.noise_samples, 1000000);
    const auto grad = lowpower_gradient_check(spec.system, spec.channel, dists, grad_mc);

    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    std::filesystem::create_directories(spec.output_dir);

    ordered_json out = meta_header(spec, "asymptotics-low");
    ordered_json cj;
    cj["r1_max"] = corners.r1_max;
    cj["r2_max"] = corners.r2_max;
    if (corners.condition_holds)
        cj["r1_at_r2_max"] = corners.r1_at_r2_max;
    else
        cj["r1_at_r2_max"] = nullptr;
    cj["condition_holds"] = corners.condition_holds;
    out["corner_points"] = cj;
    ordered_json bj;
    bj["pattern_index"] = bf.pattern_index;
    bj["pattern"] = bf.pattern;
    bj["gain"] = bf.gain;
    out["beamforming"] = bj;
    ordered_json rj;
    rj["r1"] = rates.r1;
    rj["r2"] = rates.r2;
    rj["r12"] = rates.r12;
    out["normalized_rates"] = rj;
    ordered_json gj;
    gj["analytic"] = {{"r1", grad.analytic.r1}, {"r2", grad.analytic.r2},
                      {"r12", grad.analytic.r12}};
    gj["finite_diff"] = grad.finite_diff;
    gj["ci"] = grad.ci;
    gj["max_abs_rel_err"] = grad.max_abs_rel_err;
    gj["status"] = grad.status == GradientStatus::agree        ? "agree"
                   : grad.status == GradientStatus::inconclusive ? "inconclusive"
                                                                 : "disagree";
    gj["noise_samples"] = grad_mc.noise_samples;
    out["gradient_check"] = gj;
    out["wall_time_ms"] = wall_ms;
    write_text_file(std::filesystem::path(spec.output_dir) / "lowpower.json",
                    out.dump(2) + "\n");
}

std::vector<CheckLine> run_checks(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<CheckLine> lines;
    const InputDistributions dists = effective_dists(spec);

    // Injectivity of the noiseless map. A zero reflected path collides by
    // construction and is reported as expected.
    {
        CheckLine line{"injectivity", false, ""};
        const auto rep =
            check_injectivity(spec.system, spec.channel, default_injectivity_tol(spec.system.power));
        if (rep.injective) {
            line.pass = true;
            line.note = "min pairwise distance " + format_full(rep.min_pairwise_distance);
        } else if (spec.channel.reflected_path_is_zero()) {
            line.pass = true;
            line.note = "expected-noninjective (zero reflected path)";
        } else {
            line.note = "collision at distance " + format_full(rep.min_pairwise_distance);
        }
        lines.push_back(line);
    }

    const RateBounds rb = rate_bounds(spec.system, spec.channel, dists, spec.mc);
    const auto [cap1, cap2] = high_power_rectangle(spec.system);

    {
        CheckLine line{"entropy-caps", false, ""};
        line.pass = rb.b1 <= cap1 + rb.ci1 + 1e-9 && rb.b2 <= cap2 + rb.ci2 + 1e-9 &&
                    rb.b12 <= cap1 + cap2 + rb.ci12 + 1e-9;
        line.note = "B1 " + format_full(rb.b1) + " <= " + format_full(cap1) + ", B2 " +
                    format_full(rb.b2) + " <= " + format_full(cap2);
        lines.push_back(line);
    }
    {
        CheckLine line{"sub-additivity", false, ""};
        line.pass = rb.b12 <= rb.b1 + rb.b2 + rb.ci1 + rb.ci2 + rb.ci12 + 1e-9;
        line.note = "B12 " + format_full(rb.b12) + " vs B1+B2 " + format_full(rb.b1 + rb.b2);
        lines.push_back(line);
    }
    {
        CheckLine line{"nonnegativity", false, ""};
        line.pass = rb.b1 >= -rb.ci1 - 1e-9 && rb.b2 >= -rb.ci2 - 1e-9 && rb.b12 >= -rb.ci12 - 1e-9;
        lines.push_back(line);
    }
    {
        CheckLine line{"oracle-agreement", false, ""};
        const std::size_t dim = static_cast<std::size_t>(spec.system.n_rx) *
                                static_cast<std::size_t>(spec.system.block_len);
        if (dim > 2 || spec.system.block_count() * spec.system.pattern_count() > 64) {
            line.pass = true;
            line.note = "skipped (instance too large for the oracle)";
        } else {
            const auto mi = mutual_info_oracle(spec.system, spec.channel, dists,
                                               spec.mc.noise_samples, spec.mc.seed + 1);
            auto agree = [](double b, double se_b, double i, double se_i) {
                return std::abs(b - i) <= 3.0 * std::sqrt(se_b * se_b + se_i * se_i) + 1e-9;
            };
            line.pass = agree(rb.b1, rb.se1, mi.i1, mi.se1) && agree(rb.b2, rb.se2, mi.i2, mi.se2) &&
                        agree(rb.b12, rb.se12, mi.i12, mi.se12);
            line.note = "B1 " + format_full(rb.b1) + " vs I1 " + format_full(mi.i1);
        }
        lines.push_back(line);
    }
    {
        CheckLine line{"determinism", false, ""};
        McSettings one = spec.mc;
        one.threads = 1;
        McSettings many = spec.mc;
        many.threads = 3;
        const RateBounds a = rate_bounds(spec.system, spec.channel, dists, one);
        const RateBounds b = rate_bounds(spec.system, spec.channel, dists, many);
        line.pass = std::memcmp(&a, &b, sizeof(RateBounds)) == 0;
        line.note = "1 vs 3 worker threads";
        lines.push_back(line);
    }
    return lines;
}

int cmd_check(const ExperimentSpec& spec) {
    const auto lines = run_checks(spec);
    int failures = 0;
    for (const CheckLine& line : lines) {
        std::cout << (line.pass ? "[PASS] " : "[FAIL] ") << line.name;
        if (!line.note.empty()) std::cout << ": " << line.note;
        std::cout << "\n";
        if (!line.pass) ++failures;
    }
    return failures;
}

}  // namespace rismac
