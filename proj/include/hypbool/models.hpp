#pragma once

// Conversions to the Poincare ball and upper half-space models.  The library
// computes in hyperboloid coordinates; these maps exist for I/O (plot dumps,
// the covering lattice) only.

#include "point.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace hypbool {

// Euclidean coordinates in the open unit ball; entries 0..d-1 are used.
struct BallCoords {
    int d = 2;
    std::array<double, max_dim> y{};
    double operator[](int i) const { return y[std::size_t(i)]; }
    double& operator[](int i) { return y[std::size_t(i)]; }
};

// Upper half-space coordinates; entries 0..d-1 with the last one positive.
struct HalfSpaceCoords {
    int d = 2;
    std::array<double, max_dim> h{};
    double operator[](int i) const { return h[std::size_t(i)]; }
    double& operator[](int i) { return h[std::size_t(i)]; }
    double height() const { return h[std::size_t(d - 1)]; }
};

inline BallCoords to_poincare_ball(const Point& p) {
    BallCoords b;
    b.d = p.d;
    for (int i = 0; i < p.d; ++i) b[i] = p[i + 1] / (1.0 + p[0]);
    return b;
}

inline Point from_poincare_ball(const BallCoords& b) {
    double n2 = 0.0;
    for (int i = 0; i < b.d; ++i) n2 += b[i] * b[i];
    if (n2 >= 1.0) throw std::domain_error("from_poincare_ball: |y| < 1 required");
    Point p;
    p.d = b.d;
    double f = 1.0 / (1.0 - n2);
    p[0] = (1.0 + n2) * f;
    for (int i = 0; i < b.d; ++i) p[i + 1] = 2.0 * b[i] * f;
    return p;
}

// Half-space coordinates directly from the hyperboloid: h = (x_1..x_{d-1}, 1)
// divided by x_0 + x_d.  The base point maps to height 1; going through the
// Poincare ball would cancel near its boundary.  For x_d < 0 the divisor is
// itself a difference of large numbers, recovered from the sheet identity
// x_0 + x_d = (1 + x_1^2 + ... + x_{d-1}^2) / (x_0 - x_d).
inline HalfSpaceCoords to_half_space(const Point& p) {
    const int d = p.d;
    double div;
    if (p[d] < 0.0) {
        double m = 1.0;
        for (int i = 1; i < d; ++i) m += p[i] * p[i];
        div = m / (p[0] - p[d]);
    } else {
        div = p[0] + p[d];
    }
    HalfSpaceCoords h;
    h.d = d;
    for (int i = 1; i < d; ++i) h[i - 1] = p[i] / div;
    h[d - 1] = 1.0 / div;
    return h;
}

inline Point from_half_space(const HalfSpaceCoords& h) {
    if (!(h.height() > 0.0)) throw std::domain_error("from_half_space: positive height required");
    const int d = h.d;
    double n2 = 0.0;
    for (int i = 0; i < d - 1; ++i) n2 += h[i] * h[i];
    double hd = h.height();
    Point p;
    p.d = d;
    p[0] = (1.0 + n2 + hd * hd) / (2.0 * hd);
    for (int i = 0; i < d - 1; ++i) p[i + 1] = h[i] / hd;
    p[d] = (1.0 - n2 - hd * hd) / (2.0 * hd);
    return p;
}

// Intrinsic distance in half-space coordinates.
inline double half_space_dist(const HalfSpaceCoords& a, const HalfSpaceCoords& b) {
    double q = 0.0;
    for (int i = 0; i < a.d; ++i) q += (a[i] - b[i]) * (a[i] - b[i]);
    return 2.0 * std::asinh(0.5 * std::sqrt(q / (a.height() * b.height())));
}

}  // namespace hypbool
