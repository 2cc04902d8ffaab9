#pragma once

// Horoballs as Busemann sublevel sets.  For a unit direction u at the base
// point p, b_u(z) = ln(-<z, p+u>); the horoball with offset t along u is
// { z : b_u(z) <= -t }, the decreasing limit of balls B(exp_p((t+R)u), R).

#include "constants.hpp"
#include "point.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace hypbool {

struct Horoball {
    TangentVec u;  // direction at the base point
    double t = 0.0;
};

// Busemann function in direction u.  The naive -<z,p+u> = z0 - zbar.ubar loses
// all digits when z lies far out in direction u; with n = |zbar| the sheet
// identity z0 - n = 1/(z0 + n) gives the cancellation-free split
//   z0 - zbar.ubar = 1/(z0+n) + n (1 - cos angle(zbar,ubar)),
// and 1 - cos is computed as half the squared chord.
inline double busemann(const Point& z, const TangentVec& u) {
    double n2 = 0.0;
    for (int i = 1; i <= z.d; ++i) n2 += z[i] * z[i];
    double n = std::sqrt(n2);
    if (n < 1e-150) return std::log1p(z[0] - 1.0);
    double chord2 = 0.0;
    for (int i = 1; i <= z.d; ++i) {
        double c = u[i] - z[i] / n;
        chord2 += c * c;
    }
    return std::log(1.0 / (z[0] + n) + 0.5 * n * chord2);
}

inline bool horoball_contains(const Horoball& hb, const Point& z) {
    return busemann(z, hb.u) <= -hb.t;
}

// P(z in B_{U,T}) for dist(p,z) = s, U an isotropic direction and -T
// exponential with rate d-1 (the invariant measure's offset law normalized to
// the horoballs containing p).  Reduction over the angle between U and z:
// b = ln(cosh s - sinh s cos theta), and the T-tail gives min(1, e^{-(d-1)b}).
// The integrand kink sits at cos theta = tanh(s/2), split there.
inline double horoball_hit_prob(int d, double s) {
    check_dim(d);
    if (s < 0) throw std::invalid_argument("horoball_hit_prob: s >= 0");
    if (s == 0) return 1.0;
    const double ch = std::cosh(s), sh = std::sinh(s);
    const double theta0 = std::acos(std::min(1.0, std::tanh(0.5 * s)));
    auto f = [&](double theta) {
        double b = ch - sh * std::cos(theta);
        double w = b <= 1.0 ? 1.0 : std::pow(b, 1 - d);
        return w * std::pow(std::sin(theta), d - 2);
    };
    double integral = integrate_pts(f, {0.0, theta0, pi}, 1e-12);
    return unit_sphere_area(d - 1) / unit_sphere_area(d) * integral;
}

}  // namespace hypbool
