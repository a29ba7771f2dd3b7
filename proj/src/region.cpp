#include "rismac/region.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rismac/asymptotics.hpp"
#include "rismac/rng.hpp"

namespace rismac {

namespace {

constexpr double kCollinearTol = 1e-12;

double cross(const RatePoint& o, const RatePoint& a, const RatePoint& b) {
    return (a.r2 - o.r2) * (b.r1 - o.r1) - (a.r1 - o.r1) * (b.r2 - o.r2);
}

bool same_point(const RatePoint& a, const RatePoint& b) {
    return a.r2 == b.r2 && a.r1 == b.r1;
}

// Monotone chain, counterclockwise, collinear points merged.
std::vector<RatePoint> convex_hull(std::vector<RatePoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) {
        return a.r2 < b.r2 || (a.r2 == b.r2 && a.r1 < b.r1);
    });
    pts.erase(std::unique(pts.begin(), pts.end(), same_point), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;

    std::vector<RatePoint> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= kCollinearTol) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= kCollinearTol) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

RatePentagon make_pentagon(const RateBounds& bounds, InputDistributions dists, std::string label) {
    RatePentagon p;
    p.bounds = bounds;
    p.b1 = std::max(bounds.b1, 0.0);
    p.b2 = std::max(bounds.b2, 0.0);
    p.b12 = std::clamp(bounds.b12, 0.0, p.b1 + p.b2);
    p.dists = std::move(dists);
    p.label = std::move(label);
    return p;
}

std::vector<RatePoint> pentagon_vertices(double b1, double b2, double b12) {
    b1 = std::max(b1, 0.0);
    b2 = std::max(b2, 0.0);
    b12 = std::clamp(b12, 0.0, b1 + b2);
    const double b1c = std::min(b1, b12);
    const double b2c = std::min(b2, b12);
    const std::vector<RatePoint> raw = {
        {0.0, b1c},
        {std::min(b2c, b12 - b1c), b1c},
        {b2c, std::min(b1c, b12 - b2c)},
        {b2c, 0.0},
    };
    std::vector<RatePoint> out;
    for (const RatePoint& p : raw)
        if (out.empty() || !same_point(out.back(), p)) out.push_back(p);
    return out;
}

std::vector<RatePoint> pentagon_vertices(const RatePentagon& p) {
    return pentagon_vertices(p.b1, p.b2, p.b12);
}

double RegionPolygon::area() const {
    if (vertices.size() < 2) return 0.0;
    // Shoelace over the frontier closed through the origin; the two closing
    // edges touch the axes and contribute nothing.
    double acc = 0.0;
    RatePoint prev{0.0, 0.0};
    for (const RatePoint& v : vertices) {
        acc += prev.r2 * v.r1 - v.r2 * prev.r1;
        prev = v;
    }
    return std::abs(acc) / 2.0;
}

double RegionPolygon::r1_at(double r2) const {
    if (vertices.empty()) return 0.0;
    if (r2 <= vertices.front().r2) return vertices.front().r1;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        const RatePoint& a = vertices[i];
        const RatePoint& b = vertices[i + 1];
        if (r2 <= b.r2) {
            if (b.r2 - a.r2 <= 0.0) return std::max(a.r1, b.r1);
            const double t = (r2 - a.r2) / (b.r2 - a.r2);
            return a.r1 + t * (b.r1 - a.r1);
        }
    }
    return vertices.back().r1;
}

bool RegionPolygon::contains(RatePoint p, double tol) const {
    if (p.r2 < -tol || p.r1 < -tol) return false;
    if (vertices.empty()) return p.r2 <= tol && p.r1 <= tol;
    if (p.r2 > r2_max() + tol) return false;
    return p.r1 <= r1_at(std::min(p.r2, r2_max())) + tol;
}

RegionPolygon frontier_from_points(std::vector<RatePoint> points) {
    std::vector<RatePoint> pts;
    pts.push_back({0.0, 0.0});
    for (RatePoint p : points) {
        p.r2 = std::max(p.r2, 0.0);
        p.r1 = std::max(p.r1, 0.0);
        pts.push_back(p);
        pts.push_back({p.r2, 0.0});
        pts.push_back({0.0, p.r1});
    }
    const auto hull = convex_hull(std::move(pts));

    RegionPolygon poly;
    if (hull.size() <= 2) {
        // Degenerate region: a point or an axis-aligned segment.
        double r1m = 0.0, r2m = 0.0;
        for (const RatePoint& p : hull) {
            r1m = std::max(r1m, p.r1);
            r2m = std::max(r2m, p.r2);
        }
        poly.vertices.push_back({0.0, r1m});
        if (r2m > 0.0 || r1m == 0.0) poly.vertices.push_back({r2m, 0.0});
        return poly;
    }

    double r1m = 0.0, r2m = 0.0;
    for (const RatePoint& p : hull) {
        r1m = std::max(r1m, p.r1);
        r2m = std::max(r2m, p.r2);
    }
    // Hull is counterclockwise; the frontier is the arc from the
    // bottom-right extreme up and across to the top-left extreme. Argmax
    // selection keeps the walk stable when clamping leaves vertices one ulp
    // apart.
    std::size_t bot = 0, top = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const RatePoint& p = hull[i];
        const RatePoint& b = hull[bot];
        const RatePoint& t = hull[top];
        if (p.r2 > b.r2 || (p.r2 == b.r2 && p.r1 < b.r1)) bot = i;
        if (p.r1 > t.r1 || (p.r1 == t.r1 && p.r2 < t.r2)) top = i;
    }
    std::vector<RatePoint> chain;
    for (std::size_t step = 0; step < hull.size(); ++step) {
        const std::size_t idx = (bot + step) % hull.size();
        chain.push_back(hull[idx]);
        if (idx == top) break;
    }
    std::reverse(chain.begin(), chain.end());
    // Force the exact axis intercepts the frontier contract promises.
    if (!(chain.front().r2 == 0.0 && chain.front().r1 == r1m))
        chain.insert(chain.begin(), {0.0, r1m});
    if (!(chain.back().r1 == 0.0 && chain.back().r2 == r2m)) chain.push_back({r2m, 0.0});
    chain.erase(std::unique(chain.begin(), chain.end(), same_point), chain.end());
    poly.vertices = std::move(chain);
    return poly;
}

RegionPolygon region_union_hull(std::span<const RatePentagon> pentagons) {
    if (pentagons.empty()) throw ValidationError("region hull needs at least one pentagon");
    std::vector<RatePoint> pts;
    for (const RatePentagon& p : pentagons)
        for (const RatePoint& v : pentagon_vertices(p)) pts.push_back(v);
    return frontier_from_points(std::move(pts));
}

RegionPolygon time_sharing_region(RatePoint max_r1_point, RatePoint max_r2_point) {
    return frontier_from_points({max_r1_point, max_r2_point});
}

double weighted_score(const RatePentagon& p, double weight) {
    double best = 0.0;
    for (const RatePoint& v : pentagon_vertices(p))
        best = std::max(best, weight * v.r1 + (1.0 - weight) * v.r2);
    return best;
}

const char* SearchStrategy::kind_name(Kind k) {
    switch (k) {
        case Kind::uniform_only: return "uniform_only";
        case Kind::corner_set: return "corner_set";
        case Kind::random_simplex: return "random_simplex";
        case Kind::weighted_sum_ascent: return "weighted_sum_ascent";
    }
    return "?";
}

SearchStrategy::Kind SearchStrategy::kind_from_name(const std::string& name) {
    if (name == "uniform_only") return Kind::uniform_only;
    if (name == "corner_set") return Kind::corner_set;
    if (name == "random_simplex") return Kind::random_simplex;
    if (name == "weighted_sum_ascent") return Kind::weighted_sum_ascent;
    throw ValidationError("unknown search strategy: " + name);
}

std::vector<double> SearchStrategy::effective_weights() const {
    if (!weights.empty()) return weights;
    std::vector<double> w(17);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i) / 16.0;
    return w;
}

namespace {

struct Candidate {
    InputDistributions dists;
    std::string label;
};

bool contains_dists(const std::vector<Candidate>& cands, const InputDistributions& d) {
    return std::any_of(cands.begin(), cands.end(),
                       [&d](const Candidate& c) { return c.dists == d; });
}

InputDistributions move_toward_vertex(const InputDistributions& base, std::size_t coord,
                                      std::size_t n_theta, double step) {
    InputDistributions d = base;
    if (coord < n_theta) {
        for (double& x : d.p_theta) x *= (1.0 - step);
        d.p_theta[coord] += step;
    } else {
        const std::size_t c = coord - n_theta;
        for (double& x : d.p_s) x *= (1.0 - step);
        d.p_s[c] += step;
    }
    return d;
}

// The pattern pair with the largest effective-gain separation: binary
// signaling across the two most distinguishable reflection states, the
// natural seed for the encoder-2 endpoint of the frontier.
std::optional<std::pair<std::size_t, std::size_t>> max_separation_pair(
    const SystemConfig& cfg, const ChannelRealization& ch) {
    const std::size_t n_patterns = cfg.pattern_count();
    if (n_patterns < 2 || n_patterns > 512) return std::nullopt;
    std::vector<std::vector<cplx>> gains(n_patterns);
    for (std::size_t a = 0; a < n_patterns; ++a)
        gains[a] = effective_gain(ch, cfg.pattern_angles(a));
    double best = -1.0;
    std::pair<std::size_t, std::size_t> arg{0, 1};
    for (std::size_t a = 0; a < n_patterns; ++a) {
        for (std::size_t b = a + 1; b < n_patterns; ++b) {
            double sep = 0.0;
            for (std::size_t r = 0; r < gains[a].size(); ++r)
                sep += std::norm(gains[a][r] - gains[b][r]);
            if (sep > best) {
                best = sep;
                arg = {a, b};
            }
        }
    }
    if (best <= 0.0) return std::nullopt;
    return arg;
}

}  // namespace

SearchResult search_distributions(const SystemConfig& cfg, const ChannelRealization& ch,
                                  const McSettings& mc, const SearchStrategy& strategy) {
    cfg.validate();
    ch.validate();
    mc.validate();

    SearchResult result;
    std::vector<Candidate> candidates;

    auto add_candidate = [&](InputDistributions d, std::string label) {
        if (!make_power_feasible(cfg, d)) {
            ++result.skipped;
            return;
        }
        if (!contains_dists(candidates, d)) candidates.push_back({std::move(d), std::move(label)});
    };

    add_candidate(uniform_distributions(cfg), "uniform");
    if (strategy.kind != SearchStrategy::Kind::uniform_only) {
        const auto bf = max_gain_pattern(cfg, ch);
        add_candidate(point_mass_pattern(cfg, bf.pattern_index), "beamforming");
        if (const auto pair = max_separation_pair(cfg, ch)) {
            InputDistributions d = uniform_distributions(cfg);
            d.p_theta.assign(cfg.pattern_count(), 0.0);
            d.p_theta[pair->first] = 0.5;
            d.p_theta[pair->second] = 0.5;
            add_candidate(std::move(d), "pattern-pair");
        }
    }
    for (const auto& [d, label] : strategy.extra_candidates) add_candidate(d, label);

    if (strategy.kind == SearchStrategy::Kind::random_simplex && strategy.random_draws > 0) {
        const CounterRng rng(mc.seed, rng_stream::kSimplexDraws);
        std::uint64_t counter = 0;
        for (int draw = 0; draw < strategy.random_draws; ++draw) {
            InputDistributions d;
            d.p_s.resize(cfg.block_count());
            d.p_theta.resize(cfg.pattern_count());
            // Exponential spacings give a uniform point on each simplex.
            double sum = 0.0;
            for (double& x : d.p_s) {
                x = -std::log(rng.uniform_pos(counter++));
                sum += x;
            }
            for (double& x : d.p_s) x /= sum;
            sum = 0.0;
            for (double& x : d.p_theta) {
                x = -std::log(rng.uniform_pos(counter++));
                sum += x;
            }
            for (double& x : d.p_theta) x /= sum;
            add_candidate(std::move(d), "random-" + std::to_string(draw));
        }
    }

    if (strategy.kind == SearchStrategy::Kind::weighted_sum_ascent) {
        const std::vector<double> weights = strategy.effective_weights();
        McSettings search_mc = mc;
        search_mc.noise_samples = std::max<std::size_t>(strategy.search_samples, 100);

        // Cheap-fidelity pentagons for the starting points.
        std::vector<RatePentagon> coarse;
        for (const Candidate& c : candidates)
            coarse.push_back(make_pentagon(rate_bounds(cfg, ch, c.dists, search_mc), c.dists,
                                           c.label));

        static constexpr double kSteps[] = {0.5, 0.25, 0.1, 0.05};
        const std::size_t n_theta = cfg.pattern_count();
        const std::size_t n_coords = n_theta + cfg.block_count();

        for (double w : weights) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < coarse.size(); ++i)
                if (weighted_score(coarse[i], w) > weighted_score(coarse[best], w)) best = i;
            InputDistributions current = coarse[best].dists;
            double current_score = weighted_score(coarse[best], w);

            for (int iter = 0; iter < strategy.ascent_iters; ++iter) {
                const std::size_t coord = static_cast<std::size_t>(iter) % n_coords;
                const double step =
                    kSteps[(static_cast<std::size_t>(iter) / n_coords) % std::size(kSteps)];
                InputDistributions cand = move_toward_vertex(current, coord, n_theta, step);
                if (!make_power_feasible(cfg, cand)) {
                    ++result.skipped;
                    continue;
                }
                const auto pent = make_pentagon(rate_bounds(cfg, ch, cand, search_mc), cand, "");
                const double score = weighted_score(pent, w);
                if (score > current_score + 1e-12) {
                    current = std::move(cand);
                    current_score = score;
                }
            }

            if (!contains_dists(candidates, current)) {
                candidates.push_back({std::move(current),
                                      "ascent-w=" + format_full(w)});
            }
        }
    }

    for (const Candidate& c : candidates)
        result.pentagons.push_back(
            make_pentagon(rate_bounds(cfg, ch, c.dists, mc), c.dists, c.label));
    return result;
}

}  // namespace rismac
