#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rismac/asymptotics.hpp"
#include "rismac/channel.hpp"
#include "rismac/common.hpp"
#include "rismac/distributions.hpp"
#include "rismac/mcrates.hpp"
#include "rismac/region.hpp"
#include "rismac/system.hpp"

namespace rismac {

/// One fully resolved experiment: system + channel + estimator settings +
/// region-search strategy + output location. Powers are quoted in dB in spec
/// files and converted to linear here, at the boundary.
struct ExperimentSpec {
    std::string name;
    SystemConfig system;
    double power_db = 0.0;
    ChannelRealization channel;
    McSettings mc;
    SearchStrategy strategy;
    std::optional<InputDistributions> distributions;
    std::string output_dir = "out";

    void validate() const;
};

std::vector<std::string> builtin_spec_names();
ExperimentSpec builtin_spec(const std::string& name);

/// Strict spec-file parser; unknown keys are rejected at every level.
/// Relative channel-file paths resolve against base_dir.
ExperimentSpec spec_from_json_text(const std::string& text, const std::string& base_dir = ".");

/// Builtin name, or else a spec file path.
ExperimentSpec load_spec(const std::string& name_or_path);

/// region: distribution search, union hull, CSV/JSON artifacts.
void cmd_region(const ExperimentSpec& spec);

/// asymptotics: closed forms plus the supporting numerics for one regime.
void cmd_asymptotics_high(const ExperimentSpec& spec);
void cmd_asymptotics_low(const ExperimentSpec& spec);

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string note;
};

/// The invariant suite behind `check`: injectivity, entropy caps,
/// sub-additivity, nonnegativity, oracle agreement (tiny instances),
/// determinism double-run.
std::vector<CheckLine> run_checks(const ExperimentSpec& spec);

/// Prints one line per check; returns the number of failures.
int cmd_check(const ExperimentSpec& spec);

}  // namespace rismac
