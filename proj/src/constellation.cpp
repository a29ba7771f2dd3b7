#include "rismac/constellation.hpp"

#include <cmath>

namespace rismac {

Constellation::Constellation(std::vector<cplx> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
    if (points_.size() < 2) throw ValidationError("constellation needs at least 2 points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].real()) || !std::isfinite(points_[i].imag()))
            throw ValidationError("constellation point is not finite");
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            if (points_[i] == points_[j])
                throw ValidationError("constellation points must be pairwise distinct");
        }
    }
    cplx sum{0.0, 0.0};
    double pw = 0.0;
    for (const cplx& s : points_) {
        sum += s;
        pw += std::norm(s);
    }
    mean_power_ = pw / static_cast<double>(points_.size());
    zero_mean_ = std::abs(sum) <= 1e-9;
}

Constellation Constellation::bpsk() {
    return Constellation({cplx{-1.0, 0.0}, cplx{1.0, 0.0}}, "bpsk");
}

Constellation Constellation::ask4() {
    const double s = 1.0 / std::sqrt(21.0);
    return Constellation({cplx{s, 0.0}, cplx{3.0 * s, 0.0}, cplx{5.0 * s, 0.0}, cplx{7.0 * s, 0.0}},
                         "4ask");
}

Constellation Constellation::qpsk() {
    return Constellation({cplx{1.0, 0.0}, cplx{0.0, 1.0}, cplx{-1.0, 0.0}, cplx{0.0, -1.0}},
                         "qpsk");
}

Constellation Constellation::psk8() {
    std::vector<cplx> pts;
    pts.reserve(8);
    for (int k = 0; k < 8; ++k) pts.push_back(std::polar(1.0, kTwoPi * k / 8.0));
    return Constellation(std::move(pts), "8psk");
}

Constellation Constellation::from_name(const std::string& name) {
    if (name == "bpsk") return bpsk();
    if (name == "4ask") return ask4();
    if (name == "qpsk") return qpsk();
    if (name == "8psk") return psk8();
    throw ValidationError("unknown constellation name: " + name);
}

PhaseSet::PhaseSet(int count) {
    if (count < 1) throw ValidationError("phase set needs at least 1 phase");
    angles_.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        angles_.push_back(kTwoPi * static_cast<double>(k) / static_cast<double>(count));
}

PhaseSet::PhaseSet(std::vector<double> angles) : angles_(std::move(angles)) {
    if (angles_.empty()) throw ValidationError("phase set needs at least 1 phase");
    for (std::size_t i = 0; i < angles_.size(); ++i) {
        if (!(angles_[i] >= 0.0 && angles_[i] < kTwoPi))
            throw ValidationError("phase values must lie in [0, 2*pi)");
        for (std::size_t j = i + 1; j < angles_.size(); ++j) {
            if (angles_[i] == angles_[j])
                throw ValidationError("phase values must be pairwise distinct");
        }
    }
}

}  // namespace rismac
