// Command-line front end: region / asymptotics / check over builtin or
// file-based experiment specs.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure,
// 4 check failure.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rismac/experiment.hpp"

namespace {

struct CommonOpts {
    std::string spec_ref;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t samples = 0;
    std::string out_dir;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("spec", opts.spec_ref, "builtin spec name or spec file path")->required();
    cmd->add_option("--seed", opts.seed, "override the Monte Carlo seed")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--samples", opts.samples, "override the noise sample count");
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
}

rismac::ExperimentSpec resolve(const CommonOpts& opts) {
    rismac::ExperimentSpec spec = rismac::load_spec(opts.spec_ref);
    if (opts.seed_set) spec.mc.seed = opts.seed;
    if (opts.samples > 0) spec.mc.noise_samples = static_cast<std::size_t>(opts.samples);
    if (!opts.out_dir.empty()) spec.output_dir = opts.out_dir;
    if (opts.threads >= 0) spec.mc.threads = opts.threads;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-input rate regions for a RIS-aided two-user channel"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rismac::kToolVersion));

    CommonOpts region_opts, asym_opts, check_opts;
    CLI::App* region = app.add_subcommand("region", "distribution search and union-hull frontier");
    add_common(region, region_opts);

    CLI::App* asym = app.add_subcommand("asymptotics", "closed-form limits and supporting numerics");
    add_common(asym, asym_opts);
    bool high_power = false, low_power = false;
    asym->add_flag("--high-power", high_power, "rectangle limit and power sweep");
    asym->add_flag("--low-power", low_power, "normalized rates, corner points, gradient check");

    CLI::App* check = app.add_subcommand("check", "run the invariant suite");
    add_common(check, check_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (region->parsed()) {
            const auto spec = resolve(region_opts);
            rismac::cmd_region(spec);
            std::cout << "wrote region.csv, pentagons.csv, meta.json to " << spec.output_dir
                      << "\n";
        } else if (asym->parsed()) {
            if (high_power == low_power)
                throw rismac::ValidationError("pass exactly one of --high-power / --low-power");
            const auto spec = resolve(asym_opts);
            if (high_power) {
                rismac::cmd_asymptotics_high(spec);
                std::cout << "wrote highpower.json to " << spec.output_dir << "\n";
            } else {
                rismac::cmd_asymptotics_low(spec);
                std::cout << "wrote lowpower.json to " << spec.output_dir << "\n";
            }
        } else if (check->parsed()) {
            const auto spec = resolve(check_opts);
            const int failures = rismac::cmd_check(spec);
            if (failures > 0) {
                std::cerr << failures << " check(s) failed\n";
                return 4;
            }
        }
    } catch (const rismac::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const rismac::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
