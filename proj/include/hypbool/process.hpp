#pragma once

// Stationary Poisson ball-grain process restricted to a ball window.  The
// window restriction is exact: a grain can hit B_R only if its center lies
// within R + r_max of the base point, so sampling centers uniformly in that
// enlarged ball with a Poisson count of matching mean and discarding grains
// that miss the window reproduces the restricted process with no boundary
// bias.

#include "geometry.hpp"
#include "point.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sampling.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypbool {

struct RadiusDistribution {
    enum class Kind { fixed, uniform };
    Kind kind = Kind::fixed;
    double a = 1.0, b = 1.0;  // fixed uses a == b; uniform draws from [a, b]

    static RadiusDistribution fixed(double r) {
        if (!(r > 0)) throw std::invalid_argument("RadiusDistribution: fixed radius must be positive");
        RadiusDistribution q;
        q.kind = Kind::fixed;
        q.a = q.b = r;
        return q;
    }
    static RadiusDistribution uniform(double a, double b) {
        if (!(0 <= a && a < b)) throw std::invalid_argument("RadiusDistribution: need 0 <= a < b");
        RadiusDistribution q;
        q.kind = Kind::uniform;
        q.a = a;
        q.b = b;
        return q;
    }

    double r_max() const { return b; }

    double sample(SplitMix64& rng) const {
        return kind == Kind::fixed ? a : rng.uniform(a, b);
    }

    // E f(U) for the radius law, by quadrature in the uniform case.
    template <class F>
    double expect(F&& f, double abs_tol = 1e-12) const {
        if (kind == Kind::fixed) return f(a);
        return integrate(f, a, b, abs_tol * std::max(1.0, b - a)) / (b - a);
    }
};

struct ModelParams {
    int d = 2;
    double gamma = 1.0;
    RadiusDistribution radius = RadiusDistribution::fixed(1.0);
};

inline void check_params(const ModelParams& p) {
    check_dim(p.d);
    if (!(p.gamma >= 0)) throw std::invalid_argument("ModelParams: gamma >= 0 required");
}

struct Grain {
    Point center;
    double radius = 0.0;
};

struct Realization {
    ModelParams params;
    double window_radius = 0.0;
    std::uint64_t seed = 0;  // identifies the stream the grains were drawn from
    std::vector<Grain> grains;
};

inline Realization sample_realization(SplitMix64& rng, const ModelParams& params, double R,
                                      double expected_cap = 1e7) {
    check_params(params);
    if (!(R > 0)) throw std::invalid_argument("sample_realization: R > 0 required");
    const double r_max = params.radius.r_max();
    const double mean = params.gamma * ball_volume(params.d, R + r_max);
    if (mean > expected_cap)
        throw std::runtime_error("sample_realization: expected grain count " + std::to_string(mean)
                                 + " exceeds the cap; shrink the window or the intensity");
    Realization real;
    real.params = params;
    real.window_radius = R;
    long n = rng.poisson(mean);
    real.grains.reserve(std::size_t(n));
    for (long i = 0; i < n; ++i) {
        Grain g;
        g.center = sample_uniform_ball_at_base(params.d, R + r_max, rng);
        g.radius = params.radius.sample(rng);
        if (dist(g.center, base_point(params.d)) <= R + g.radius) real.grains.push_back(g);
    }
    return real;
}

inline bool point_covered(const Realization& real, const Point& z) {
    for (const Grain& g : real.grains)
        if (cosh_dist(z, g.center) <= std::cosh(g.radius)) return true;
    return false;
}

// P(p not covered) = exp(-gamma E Vol(G)).
inline double empty_prob_point(const ModelParams& params) {
    check_params(params);
    double vd = params.radius.expect([&](double r) { return ball_volume(params.d, r); });
    return std::exp(-params.gamma * vd);
}

inline double empirical_coverage(const ModelParams& params, long replicates, std::uint64_t seed) {
    if (replicates < 1) throw std::invalid_argument("empirical_coverage: replicates >= 1");
    long covered = 0;
    for (long rep = 0; rep < replicates; ++rep) {
        SplitMix64 rng = SplitMix64::stream(seed, std::uint64_t(rep));
        Realization real = sample_realization(rng, params, 1e-3);
        if (point_covered(real, base_point(params.d))) ++covered;
    }
    return double(covered) / double(replicates);
}

}  // namespace hypbool
