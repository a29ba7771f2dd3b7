#pragma once

#include <cstddef>
#include <vector>

#include "rismac/common.hpp"
#include "rismac/constellation.hpp"

namespace rismac {

/// Mixed-radix enumeration of length-`len` tuples over {0..radix-1},
/// lexicographic with the last coordinate fastest.
struct TupleCodec {
    int radix = 1;
    int len = 0;
    std::size_t count = 1;

    TupleCodec() = default;
    TupleCodec(int radix_, int len_, std::size_t cap);

    std::vector<int> decode(std::size_t index) const;
    std::size_t encode(std::span<const int> tuple) const;
};

/// Static description of one experiment: array sizes, block structure,
/// transmit power (linear) and the two input alphabets.
struct SystemConfig {
    int n_rx = 1;          // receive antennas
    int n_ris = 1;         // RIS elements
    int block_len = 1;     // symbols per RIS update
    double power = 1.0;    // linear transmit power
    Constellation constellation = Constellation::bpsk();
    PhaseSet phase_set = PhaseSet(2);
    std::size_t enumeration_cap = 4096;  // per-alphabet guard against blowups

    void validate() const;

    std::size_t symbol_count() const { return constellation.size(); }
    std::size_t phase_count() const { return static_cast<std::size_t>(phase_set.count()); }

    /// Codec for symbol blocks in S^m (throws if S^m exceeds the cap).
    TupleCodec block_codec() const;
    /// Codec for phase patterns in A^K (throws if A^K exceeds the cap).
    TupleCodec pattern_codec() const;

    std::size_t block_count() const { return block_codec().count; }
    std::size_t pattern_count() const { return pattern_codec().count; }

    /// Symbol values of block `index`, length m.
    std::vector<cplx> block_symbols(std::size_t index) const;
    /// Phase angles of pattern `index`, length K.
    std::vector<double> pattern_angles(std::size_t index) const;
    /// Squared Euclidean norm of the symbol block `index`.
    double block_energy(std::size_t index) const;
};

}  // namespace rismac
