#pragma once

#include <string>
#include <vector>

#include "rismac/common.hpp"

namespace rismac {

/// Finite transmit constellation. Points are dimensionless baseband symbols;
/// the per-symbol power budget is carried separately by the system config.
class Constellation {
  public:
    Constellation(std::vector<cplx> points, std::string label);

    const std::vector<cplx>& points() const { return points_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return points_.size(); }

    double mean_power() const { return mean_power_; }
    /// True iff the points sum to zero (to 1e-9); required by the low-power analysis.
    bool zero_mean() const { return zero_mean_; }
    /// True iff the uniform distribution satisfies the unit average-power budget.
    bool uniform_power_feasible() const { return mean_power_ <= 1.0 + 1e-9; }

    static Constellation bpsk();
    /// 4-ASK {s, 3s, 5s, 7s} with s = 1/sqrt(21), unit mean power.
    static Constellation ask4();
    static Constellation qpsk();
    static Constellation psk8();
    static Constellation from_name(const std::string& name);

  private:
    std::vector<cplx> points_;
    std::string label_;
    double mean_power_ = 0.0;
    bool zero_mean_ = false;
};

/// The set of phase shifts each RIS element can apply.
class PhaseSet {
  public:
    /// Uniformly spaced phases {0, 2*pi/A, ..., 2*pi*(A-1)/A}.
    explicit PhaseSet(int count);
    /// Custom angles; must be pairwise distinct and lie in [0, 2*pi).
    explicit PhaseSet(std::vector<double> angles);

    int count() const { return static_cast<int>(angles_.size()); }
    const std::vector<double>& angles() const { return angles_; }

  private:
    std::vector<double> angles_;
};

}  // namespace rismac
