#pragma once

// Monte Carlo estimators of the geometric functionals of Z intersect B_R:
// volume by hit-or-miss over the window, surface area by sampling each grain
// sphere (and the window sphere) and keeping the uncovered boundary, and the
// d = 2 Euler characteristic via the nerve.  Estimators draw their sample
// streams from the caller's generator, so results are reproducible and
// independent of the thread count.

#include "geometry.hpp"
#include "index.hpp"
#include "nerve.hpp"
#include "parallel.hpp"
#include "point.hpp"
#include "process.hpp"
#include "rng.hpp"
#include "sampling.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hypbool {

struct FunctionalEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
};

inline FunctionalEstimate estimate_volume(const Realization& real, long n, SplitMix64& rng) {
    if (n < 1) throw std::invalid_argument("estimate_volume: n >= 1 required");
    const int d = real.params.d;
    const double R = real.window_radius;
    GrainIndex index(real);
    const std::uint64_t root = rng.next();
    const long chunk = 8192;
    const long n_chunks = (n + chunk - 1) / chunk;
    std::vector<long> hits(std::size_t(n_chunks), 0);
    parallel_for(n_chunks, [&](long c) {
        SplitMix64 sub = SplitMix64::stream(root, std::uint64_t(c));
        long lo = c * chunk, hi = std::min(n, lo + chunk);
        long h = 0;
        for (long i = lo; i < hi; ++i)
            if (index.covered(sample_uniform_ball_at_base(d, R, sub))) ++h;
        hits[std::size_t(c)] = h;
    });
    long total = 0;
    for (long h : hits) total += h;
    const double vol = ball_volume(d, R);
    const double p = double(total) / double(n);
    FunctionalEstimate est;
    est.value = vol * p;
    est.std_error = vol * std::sqrt(p * (1.0 - p) / double(n));
    est.n_samples = n;
    return est;
}

// H^{d-1} of (boundary of Z inside the open window) plus (Z on the window
// sphere): each grain sphere is sampled uniformly and scaled by its area,
// keeping points inside the window and covered by no other grain; the window
// sphere is sampled likewise, keeping points covered by some grain.
inline FunctionalEstimate estimate_surface(const Realization& real, long n_per_grain, SplitMix64& rng) {
    if (n_per_grain < 1) throw std::invalid_argument("estimate_surface: n_per_grain >= 1 required");
    const int d = real.params.d;
    const double R = real.window_radius;
    const double cosh_R = std::cosh(R);
    const Point base = base_point(d);
    GrainIndex index(real);
    const std::uint64_t root = rng.next();
    const long n_grains = long(real.grains.size());
    std::vector<double> value(std::size_t(n_grains) + 1, 0.0), var(std::size_t(n_grains) + 1, 0.0);
    parallel_for(n_grains, [&](long g) {
        SplitMix64 sub = SplitMix64::stream(root, std::uint64_t(g));
        const Grain& grain = real.grains[std::size_t(g)];
        long keep = 0;
        for (long i = 0; i < n_per_grain; ++i) {
            Point z = sample_sphere(grain.center, grain.radius, sub);
            if (-mink(z, base) <= cosh_R && !index.covered(z, g)) ++keep;
        }
        double area = sphere_area(d, grain.radius);
        double p = double(keep) / double(n_per_grain);
        value[std::size_t(g)] = area * p;
        var[std::size_t(g)] = area * area * p * (1.0 - p) / double(n_per_grain);
    });
    const long n_window = 8 * n_per_grain;
    {
        SplitMix64 sub = SplitMix64::stream(root, std::uint64_t(n_grains));
        long keep = 0;
        for (long i = 0; i < n_window; ++i)
            if (index.covered(sample_sphere(base, R, sub))) ++keep;
        double area = sphere_area(d, R);
        double p = double(keep) / double(n_window);
        value[std::size_t(n_grains)] = area * p;
        var[std::size_t(n_grains)] = area * area * p * (1.0 - p) / double(n_window);
    }
    FunctionalEstimate est;
    est.value = pairwise_sum(value);
    est.std_error = std::sqrt(pairwise_sum(var));
    est.n_samples = n_grains * n_per_grain + n_window;
    return est;
}

// V_0 = 2 pi chi + V_2 in the plane.
inline double v0_2d(const Realization& real, const FunctionalEstimate& vol_estimate) {
    return 2.0 * pi * double(euler_char_2d(real)) + vol_estimate.value;
}

}  // namespace hypbool
