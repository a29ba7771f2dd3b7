#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rismac {

inline constexpr const char* kToolVersion = "0.1.0";

using cplx = std::complex<double>;

inline constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
inline constexpr double kLn2 = 0.6931471805599453094;
inline constexpr double kTwoPi = 6.2831853071795864769;

/// Bad configuration or malformed input (CLI exit code 2).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite intermediate or failed numerical procedure (CLI exit code 3).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Pairwise (cascade) summation. Result depends only on element order,
/// never on how the caller split the work across threads.
double pairwise_sum(std::span<const double> v);

struct MeanVar {
    double mean = 0.0;
    double std_err = 0.0;
};

/// Mean and standard error of the mean, both via pairwise summation.
MeanVar mean_and_std_err(std::span<const double> v);

/// Inverse standard normal CDF (rational approximation plus one Halley step).
double probit(double p);

/// Two-sided z-multiplier for a confidence level in (0,1), e.g. 0.95 -> 1.96.
double ci_multiplier(double ci_level);

/// FNV-1a over raw bytes; used to fingerprint channel realizations in metadata.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Shortest round-trip decimal form (%.17g).
std::string format_full(double x);

}  // namespace rismac
