#pragma once

// Uniform sampling in balls and on spheres of H^d.  Directions are isotropic;
// the radial law has density proportional to sinh^{d-1}, inverted in closed
// form for d = 2 and by Newton iteration on the exact antiderivative above.

#include "geometry.hpp"
#include "isometry.hpp"
#include "point.hpp"
#include "rng.hpp"

#include <cmath>

namespace hypbool {

inline TangentVec uniform_direction(int d, SplitMix64& rng) {
    check_dim(d);
    TangentVec v;
    v.d = d;
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int i = 1; i <= d; ++i) {
            v[i] = rng.normal();
            n2 += v[i] * v[i];
        }
    } while (n2 < 1e-24);
    double inv = 1.0 / std::sqrt(n2);
    for (int i = 1; i <= d; ++i) v[i] *= inv;
    return v;
}

// Radius with CDF I_{d-1}(s)/I_{d-1}(R), I_k the sinh^k antiderivative.
inline double uniform_ball_radius(int d, double R, SplitMix64& rng) {
    double v = rng.uniform01();
    if (d == 2) {
        // cosh s - 1 uniform on [0, cosh R - 1].
        double e = v * (std::cosh(R) - 1.0);
        return std::log1p(e + std::sqrt(e * (2.0 + e)));
    }
    double target = v * sinh_pow_integral(d - 1, R);
    double lo = 0.0, hi = R;
    double s = R * std::pow(v, 1.0 / d);  // exact for the flat small-radius limit
    for (int it = 0; it < 64; ++it) {
        double g = sinh_pow_integral(d - 1, s) - target;
        if (g > 0) hi = s; else lo = s;
        double deriv = std::pow(std::sinh(s), d - 1);
        double step = deriv > 0 ? g / deriv : 0.0;
        double next = s - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - s) < 1e-15 * R) { s = next; break; }
        s = next;
    }
    return s;
}

inline Point sample_uniform_ball_at_base(int d, double R, SplitMix64& rng) {
    TangentVec u = uniform_direction(d, rng);
    double s = uniform_ball_radius(d, R, rng);
    return exp_map(base_point(d), u, s);
}

// Uniform point on the sphere of radius r about c: sample about the base
// point, then translate (isometries preserve the surface measure).
inline Point sample_sphere(const Point& c, double r, SplitMix64& rng) {
    TangentVec u = uniform_direction(c.d, rng);
    Point at_base = exp_map(base_point(c.d), u, r);
    return apply(translation_to(c), at_base);
}

}  // namespace hypbool
