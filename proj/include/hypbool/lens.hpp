#pragma once

// Two-ball intersections (lenses) in H^d, reduced to spherical caps.  A
// geodesic hyperplane crossing the axis orthogonally at signed distance t
// from a ball center cuts the sphere of radius rho in the polar cap
// cos(theta) >= tanh(t)/tanh(rho): with the center at the base point and the
// plane normal n = (sinh t, cosh t, 0, ...), a sphere point at polar angle
// theta has <x, n> = -cosh(rho) sinh(t) + sinh(rho) cos(theta) cosh(t).  Cap
// areas are closed-form in the sin-power antiderivative; cap volumes
// integrate them over radial shells.  The lens splits into two caps along
// the geodesic plane through its rim.

#include "constants.hpp"
#include "geometry.hpp"
#include "point.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypbool {

// S_k(theta) = integral of sin^k over [0, theta] by the standard recurrence.
inline double sin_pow_integral(int k, double theta) {
    if (k < 0) throw std::invalid_argument("sin_pow_integral: k >= 0");
    if (k == 0) return theta;
    double sn = std::sin(theta), cs = std::cos(theta);
    double prev = theta;
    double cur = 1.0 - cs;
    if (k == 1) return cur;
    double snp = sn;  // sin^{j-1} at j = 2
    for (int j = 2; j <= k; ++j) {
        double next = (-cs * snp + (j - 1) * prev) / j;
        prev = cur;
        cur = next;
        snp *= sn;
    }
    return cur;
}

// Area of the cap of the sphere of radius r cut off by the geodesic
// hyperplane crossing the cap axis at signed distance t from the center.
inline double cap_area(int d, double r, double t) {
    check_dim(d);
    if (r < 0) throw std::invalid_argument("cap_area: r >= 0");
    if (t >= r) return 0.0;
    if (t <= -r) return sphere_area(d, r);
    double theta = std::acos(std::clamp(std::tanh(t) / std::tanh(r), -1.0, 1.0));
    return unit_sphere_area(d - 1) * std::pow(std::sinh(r), d - 1) * sin_pow_integral(d - 2, theta);
}

// Volume of the part of the ball of radius r beyond the geodesic hyperplane
// crossing the cap axis at signed distance t from the center.
inline double cap_volume(int d, double r, double t) {
    check_dim(d);
    if (r < 0) throw std::invalid_argument("cap_volume: r >= 0");
    if (t >= r) return 0.0;
    if (t <= -r) return ball_volume(d, r);
    if (t < 0) return ball_volume(d, r) - cap_volume(d, r, -t);
    if (t == 0.0) return 0.5 * ball_volume(d, r);
    double tht = std::tanh(t);
    auto shell = [&](double rho) {
        double theta = std::acos(std::clamp(tht / std::tanh(rho), -1.0, 1.0));
        return sin_pow_integral(d - 2, theta) * std::pow(std::sinh(rho), d - 1);
    };
    double tol = 1e-10 * std::max(1.0, ball_volume(d, r));
    return unit_sphere_area(d - 1) * integrate(shell, t, r, tol);
}

// Signed distance from the first center to the radical plane of the two
// spheres, along the axis toward the second center.
inline double lens_plane_offset(double r1, double r2, double s) {
    double ta = (std::cosh(r1) * std::cosh(s) - std::cosh(r2)) / (std::cosh(r1) * std::sinh(s));
    return std::atanh(std::clamp(ta, -1.0, 1.0));
}

inline double lens_volume(int d, double r1, double r2, double s) {
    check_dim(d);
    if (r1 < 0 || r2 < 0 || s < 0) throw std::invalid_argument("lens_volume: nonnegative arguments");
    if (s >= r1 + r2) return 0.0;
    if (s <= std::fabs(r1 - r2)) return ball_volume(d, std::min(r1, r2));
    double t1 = lens_plane_offset(r1, r2, s);
    return cap_volume(d, r1, t1) + cap_volume(d, r2, s - t1);
}

// Surface area of the lens boundary: two spherical caps.
inline double lens_surface(int d, double r1, double r2, double s) {
    check_dim(d);
    if (r1 < 0 || r2 < 0 || s < 0) throw std::invalid_argument("lens_surface: nonnegative arguments");
    if (s >= r1 + r2) return 0.0;
    if (s <= std::fabs(r1 - r2)) return sphere_area(d, std::min(r1, r2));
    double t1 = lens_plane_offset(r1, r2, s);
    return cap_area(d, r1, t1) + cap_area(d, r2, s - t1);
}

}  // namespace hypbool
