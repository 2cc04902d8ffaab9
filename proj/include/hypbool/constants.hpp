#pragma once

// Dimension-dependent constants: unit-sphere areas, unit-ball volumes and the
// renormalization constants that put the kinematic formula in convolution form.

#include <cmath>
#include <stdexcept>

namespace hypbool {

inline constexpr double pi = 3.14159265358979323846;

// Surface area of the unit sphere S^{n-1} in R^n: omega_n = 2 pi^{n/2} / Gamma(n/2).
inline double unit_sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("unit_sphere_area: n >= 1");
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// Volume of the unit ball in R^n, kappa_n = omega_n / n, with kappa_0 = 1.
inline double unit_ball_volume(int n) {
    if (n < 0) throw std::invalid_argument("unit_ball_volume: n >= 0");
    return n == 0 ? 1.0 : unit_sphere_area(n) / n;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

// Constant c_{d,j} with V_j^0 = c_{d,j} V_j, chosen so that
// integrating V_k^0 of an intersection over all isometries factors as
// sum_{i+j=d+k} V_i^0 V_j^0.  For j = d the volume is left untouched.
inline double renorm_const(int d, int j) {
    if (d < 2 || j < 0 || j > d) throw std::invalid_argument("renorm_const: 0 <= j <= d, d >= 2");
    if (j == d) return 1.0;
    return unit_sphere_area(d + 1) / (unit_sphere_area(j + 1) * unit_sphere_area(d - j))
         * binomial(d - 1, j);
}

}  // namespace hypbool
