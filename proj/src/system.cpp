#include "rismac/system.hpp"

#include <cmath>
#include <string>

namespace rismac {

TupleCodec::TupleCodec(int radix_, int len_, std::size_t cap) : radix(radix_), len(len_) {
    if (radix < 1 || len < 1) throw ValidationError("tuple codec needs radix >= 1 and length >= 1");
    count = 1;
    for (int i = 0; i < len; ++i) {
        if (count > cap / static_cast<std::size_t>(radix) + 1) {
            throw ValidationError("alphabet size " + std::to_string(radix) + "^" +
                                  std::to_string(len) + " exceeds enumeration cap " +
                                  std::to_string(cap));
        }
        count *= static_cast<std::size_t>(radix);
    }
    if (count > cap)
        throw ValidationError("alphabet size " + std::to_string(count) +
                              " exceeds enumeration cap " + std::to_string(cap));
}

std::vector<int> TupleCodec::decode(std::size_t index) const {
    if (index >= count) throw ValidationError("tuple index out of range");
    std::vector<int> tuple(static_cast<std::size_t>(len));
    for (int pos = len - 1; pos >= 0; --pos) {
        tuple[static_cast<std::size_t>(pos)] = static_cast<int>(index % static_cast<std::size_t>(radix));
        index /= static_cast<std::size_t>(radix);
    }
    return tuple;
}

std::size_t TupleCodec::encode(std::span<const int> tuple) const {
    if (tuple.size() != static_cast<std::size_t>(len))
        throw ValidationError("tuple length mismatch");
    std::size_t index = 0;
    for (int v : tuple) {
        if (v < 0 || v >= radix) throw ValidationError("tuple digit out of range");
        index = index * static_cast<std::size_t>(radix) + static_cast<std::size_t>(v);
    }
    return index;
}

void SystemConfig::validate() const {
    if (n_rx < 1) throw ValidationError("n_rx must be >= 1");
    if (n_ris < 1) throw ValidationError("n_ris must be >= 1");
    if (block_len < 1) throw ValidationError("block_len must be >= 1");
    if (!(power >= 0.0) || !std::isfinite(power))
        throw ValidationError("power must be finite and >= 0");
    block_codec();
    pattern_codec();
}

TupleCodec SystemConfig::block_codec() const {
    return TupleCodec(static_cast<int>(constellation.size()), block_len, enumeration_cap);
}

TupleCodec SystemConfig::pattern_codec() const {
    return TupleCodec(phase_set.count(), n_ris, enumeration_cap);
}

std::vector<cplx> SystemConfig::block_symbols(std::size_t index) const {
    const auto digits = block_codec().decode(index);
    std::vector<cplx> out(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i)
        out[i] = constellation.points()[static_cast<std::size_t>(digits[i])];
    return out;
}

std::vector<double> SystemConfig::pattern_angles(std::size_t index) const {
    const auto digits = pattern_codec().decode(index);
    std::vector<double> out(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i)
        out[i] = phase_set.angles()[static_cast<std::size_t>(digits[i])];
    return out;
}

double SystemConfig::block_energy(std::size_t index) const {
    double e = 0.0;
    for (const cplx& s : block_symbols(index)) e += std::norm(s);
    return e;
}

}  // namespace rismac
