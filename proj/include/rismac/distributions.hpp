#pragma once

#include <vector>

#include "rismac/common.hpp"
#include "rismac/system.hpp"

namespace rismac {

/// Probability vectors over the symbol-block alphabet S^m and the
/// phase-pattern alphabet A^K, both in lexicographic order.
struct InputDistributions {
    std::vector<double> p_s;      // length S^m
    std::vector<double> p_theta;  // length A^K

    /// Checks lengths, simplex membership (sum within 1e-12 of 1, entries >= 0)
    /// and the average-power constraint sum_b p_s(b) * ||s_b||^2 <= m + 1e-9.
    void validate(const SystemConfig& cfg) const;

    double symbol_power(const SystemConfig& cfg) const;

    bool operator==(const InputDistributions&) const = default;
};

InputDistributions uniform_distributions(const SystemConfig& cfg);
InputDistributions point_mass_pattern(const SystemConfig& cfg, std::size_t pattern_index);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v);

/// Euclidean projection onto {p in simplex : costs . p <= budget}, by
/// bisection on the multiplier of the cost constraint. Returns false when
/// the constraint set is empty (min cost above budget).
bool project_simplex_with_budget(std::vector<double>& p, std::span<const double> costs,
                                 double budget);

/// Projects p_s onto the power-feasible simplex for cfg (p_theta needs the
/// plain simplex only). Returns false when no feasible p_s exists.
bool make_power_feasible(const SystemConfig& cfg, InputDistributions& dists);

}  // namespace rismac
