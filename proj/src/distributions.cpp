#include "rismac/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rismac {

namespace {

void check_simplex(const std::vector<double>& p, std::size_t expected, const char* name) {
    if (p.size() != expected)
        throw ValidationError(std::string(name) + " has length " + std::to_string(p.size()) +
                              ", expected " + std::to_string(expected));
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ValidationError(std::string(name) + " entries must be finite and >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError(std::string(name) + " must sum to 1 (got " + format_full(sum) + ")");
}

}  // namespace

void InputDistributions::validate(const SystemConfig& cfg) const {
    check_simplex(p_s, cfg.block_count(), "p_s");
    check_simplex(p_theta, cfg.pattern_count(), "p_theta");
    const double pw = symbol_power(cfg);
    if (pw > static_cast<double>(cfg.block_len) + 1e-9)
        throw ValidationError("p_s violates the power constraint: E||s||^2 = " + format_full(pw) +
                              " > m = " + std::to_string(cfg.block_len));
}

double InputDistributions::symbol_power(const SystemConfig& cfg) const {
    double pw = 0.0;
    for (std::size_t b = 0; b < p_s.size(); ++b) pw += p_s[b] * cfg.block_energy(b);
    return pw;
}

InputDistributions uniform_distributions(const SystemConfig& cfg) {
    InputDistributions d;
    d.p_s.assign(cfg.block_count(), 1.0 / static_cast<double>(cfg.block_count()));
    d.p_theta.assign(cfg.pattern_count(), 1.0 / static_cast<double>(cfg.pattern_count()));
    return d;
}

InputDistributions point_mass_pattern(const SystemConfig& cfg, std::size_t pattern_index) {
    if (pattern_index >= cfg.pattern_count())
        throw ValidationError("pattern index out of range");
    InputDistributions d;
    d.p_s.assign(cfg.block_count(), 1.0 / static_cast<double>(cfg.block_count()));
    d.p_theta.assign(cfg.pattern_count(), 0.0);
    d.p_theta[pattern_index] = 1.0;
    return d;
}

std::vector<double> project_simplex(std::vector<double> v) {
    // Sort-based projection: find the largest prefix with positive shifted mass.
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double prefix = 0.0;
    double tau = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        prefix += sorted[j];
        const double t = (prefix - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - t > 0.0) tau = t;
    }
    double sum = 0.0;
    for (double& x : v) {
        x = std::max(x - tau, 0.0);
        sum += x;
    }
    if (sum <= 0.0) throw NumericalError("simplex projection produced an empty support");
    for (double& x : v) x /= sum;  // absorb rounding so the result sums to 1 exactly enough
    return v;
}

bool project_simplex_with_budget(std::vector<double>& p, std::span<const double> costs,
                                 double budget) {
    if (p.size() != costs.size()) throw ValidationError("cost vector length mismatch");
    auto cost_of = [&costs](const std::vector<double>& q) {
        double c = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) c += q[i] * costs[i];
        return c;
    };

    std::vector<double> base = project_simplex(p);
    if (cost_of(base) <= budget + 1e-9) {
        p = std::move(base);
        return true;
    }
    const double min_cost = *std::min_element(costs.begin(), costs.end());
    if (min_cost > budget + 1e-9) return false;

    auto shifted = [&](double nu) {
        std::vector<double> q(p.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = p[i] - nu * costs[i];
        return project_simplex(std::move(q));
    };

    // cost(shifted(nu)) is nonincreasing in nu; bracket then bisect.
    double lo = 0.0, hi = 1.0;
    while (cost_of(shifted(hi)) > budget && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cost_of(shifted(mid)) > budget)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
    }
    p = shifted(hi);
    return cost_of(p) <= budget + 1e-9;
}

bool make_power_feasible(const SystemConfig& cfg, InputDistributions& dists) {
    std::vector<double> costs(cfg.block_count());
    for (std::size_t b = 0; b < costs.size(); ++b) costs[b] = cfg.block_energy(b);
    dists.p_theta = project_simplex(std::move(dists.p_theta));
    return project_simplex_with_budget(dists.p_s, costs, static_cast<double>(cfg.block_len));
}

}  // namespace rismac
