#pragma once

#include <string>
#include <vector>

#include "rismac/common.hpp"
#include "rismac/distributions.hpp"
#include "rismac/mcrates.hpp"

namespace rismac {

struct RatePoint {
    double r2 = 0.0;
    double r1 = 0.0;
};

/// One achievable region {R1 <= b1, R2 <= b2, R1+R2 <= b12, R >= 0} with the
/// distributions that produced it. Bounds are clamped nonnegative and the
/// sum bound to b1 + b2 before any geometry.
struct RatePentagon {
    double b1 = 0.0, b2 = 0.0, b12 = 0.0;
    RateBounds bounds;
    InputDistributions dists;
    std::string label;
};

RatePentagon make_pentagon(const RateBounds& bounds, InputDistributions dists, std::string label);

/// Extreme points in frontier order (R2 nondecreasing), including the two
/// axis intercepts. Degenerate shapes (rectangle, simplex, segments) come
/// out with duplicates removed.
std::vector<RatePoint> pentagon_vertices(const RatePentagon& p);
std::vector<RatePoint> pentagon_vertices(double b1, double b2, double b12);

/// Convex, downward-closed union region: the frontier from (0, max R1) to
/// (max R2, 0), R2 nondecreasing and R1 nonincreasing.
struct RegionPolygon {
    std::vector<RatePoint> vertices;

    double r1_max() const { return vertices.empty() ? 0.0 : vertices.front().r1; }
    double r2_max() const { return vertices.empty() ? 0.0 : vertices.back().r2; }
    double area() const;
    bool contains(RatePoint p, double tol = 1e-9) const;
    /// Largest R1 on the frontier at abscissa r2.
    double r1_at(double r2) const;
};

/// Convex hull of a point cloud, downward-closed (axis projections and the
/// origin are implied), reduced to its upper-right frontier.
RegionPolygon frontier_from_points(std::vector<RatePoint> points);

/// Hull of the union of pentagon regions.
RegionPolygon region_union_hull(std::span<const RatePentagon> pentagons);

/// Classical time-sharing frontier between the two single-encoder operating
/// points (chords only, no mixing of codebooks).
RegionPolygon time_sharing_region(RatePoint max_r1_point, RatePoint max_r2_point);

struct SearchStrategy {
    enum class Kind { uniform_only, corner_set, random_simplex, weighted_sum_ascent };
    Kind kind = Kind::weighted_sum_ascent;
    int random_draws = 0;
    std::vector<double> weights;          // empty -> 17 evenly spaced in [0,1]
    int ascent_iters = 200;
    std::size_t search_samples = 2000;    // hill-climb fidelity; winners re-run at full samples
    std::vector<std::pair<InputDistributions, std::string>> extra_candidates;

    static const char* kind_name(Kind k);
    static Kind kind_from_name(const std::string& name);
    /// The ascent weights actually used (defaults filled in when empty).
    std::vector<double> effective_weights() const;
};

struct SearchResult {
    std::vector<RatePentagon> pentagons;
    int skipped = 0;  // candidates dropped as power-infeasible after projection
};

/// Evaluates input-distribution candidates with a common noise stream and
/// returns their pentagons. Always includes the uniform pair and (beyond
/// uniform_only) the max-gain point-mass pattern.
SearchResult search_distributions(const SystemConfig& cfg, const ChannelRealization& ch,
                                  const McSettings& mc, const SearchStrategy& strategy);

/// Support value max_{(R1,R2) in pentagon} [w*R1 + (1-w)*R2]; the ascent
/// objective for weight w.
double weighted_score(const RatePentagon& p, double weight);

}  // namespace rismac
