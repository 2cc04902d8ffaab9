#pragma once

// Closed-form ball geometry in H^d: volumes, sphere areas, intrinsic volumes
// of balls, and the Steiner coefficients for parallel volumes.

#include "constants.hpp"
#include "point.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hypbool {

// I_k(x) = integral of sinh^k over [0,x], by the standard recurrence
// I_k = (sinh^{k-1} x cosh x - (k-1) I_{k-2}) / k.
inline double sinh_pow_integral(int k, double x) {
    if (k < 0) throw std::invalid_argument("sinh_pow_integral: k >= 0");
    if (k == 0) return x;
    double sh = std::sinh(x), ch = std::cosh(x);
    double prev = x;             // I_0
    double cur = ch - 1.0;       // I_1
    if (k == 1) return cur;
    double shp = sh;             // sinh^{j-1} at j = 2
    for (int j = 2; j <= k; ++j) {
        double next = (shp * ch - (j - 1) * prev) / j;
        prev = cur;
        cur = next;
        shp *= sh;
    }
    return cur;
}

inline double sphere_area(int d, double r) {
    check_dim(d);
    if (r < 0) throw std::invalid_argument("sphere_area: r >= 0");
    return unit_sphere_area(d) * std::pow(std::sinh(r), d - 1);
}

inline double ball_volume(int d, double r) {
    check_dim(d);
    if (r < 0) throw std::invalid_argument("ball_volume: r >= 0");
    return unit_sphere_area(d) * sinh_pow_integral(d - 1, r);
}

// V_j of a ball of radius r: omega_d cosh^{d-1-j} r sinh^j r for j < d,
// and the volume for j = d.
inline double intrinsic_volume_ball(int d, int j, double r) {
    check_dim(d);
    if (j < 0 || j > d) throw std::invalid_argument("intrinsic_volume_ball: 0 <= j <= d");
    if (r < 0) throw std::invalid_argument("intrinsic_volume_ball: r >= 0");
    if (j == d) return ball_volume(d, r);
    return unit_sphere_area(d) * std::pow(std::cosh(r), d - 1 - j) * std::pow(std::sinh(r), j);
}

// Steiner coefficient l_{d,j}(r) = C(d-1,j) * integral_0^r cosh^j t sinh^{d-1-j} t dt,
// so that Vol(ball around A at distance r) = V_d(A) + sum_j l_{d,j}(r) V_j(A).
inline double steiner_coeff(int d, int j, double r) {
    check_dim(d);
    if (j < 0 || j > d - 1) throw std::invalid_argument("steiner_coeff: 0 <= j <= d-1");
    if (r < 0) throw std::invalid_argument("steiner_coeff: r >= 0");
    if (r == 0) return 0.0;
    double integral = integrate(
        [&](double t) { return std::pow(std::cosh(t), j) * std::pow(std::sinh(t), d - 1 - j); },
        0.0, r, 1e-12 * std::max(1.0, std::pow(std::cosh(r), d - 1)));
    return binomial(d - 1, j) * integral;
}

}  // namespace hypbool
