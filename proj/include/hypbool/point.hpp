#pragma once

// Points and tangent vectors of the hyperboloid model of d-dimensional
// hyperbolic space, embedded in Minkowski space R^{1,d}:
//
//   <x,y> = -x0 y0 + x1 y1 + ... + xd yd,
//   H^d = { x : <x,x> = -1, x0 >= 1 },  base point p = (1,0,...,0).
//
// A tangent vector at x satisfies <x,v> = 0; directions are unit, <v,v> = 1.
// Distances come from cosh dist(x,y) = -<x,y>, with cancellation-free paths
// for nearby points.

#include <array>
#include <cmath>
#include <stdexcept>

namespace hypbool {

inline constexpr int max_dim = 7;

struct Point {
    int d = 2;                            // space dimension; coords 0..d are used
    std::array<double, max_dim + 1> x{};  // Minkowski components

    double operator[](int i) const { return x[std::size_t(i)]; }
    double& operator[](int i) { return x[std::size_t(i)]; }
};

struct TangentVec {
    int d = 2;
    std::array<double, max_dim + 1> x{};

    double operator[](int i) const { return x[std::size_t(i)]; }
    double& operator[](int i) { return x[std::size_t(i)]; }
};

inline void check_dim(int d) {
    if (d < 2 || d > max_dim) throw std::invalid_argument("dimension must be in [2,7]");
}

inline Point base_point(int d) {
    check_dim(d);
    Point p;
    p.d = d;
    p.x[0] = 1.0;
    return p;
}

template <class A, class B>
inline double mink(const A& a, const B& b) {
    double s = -a[0] * b[0];
    for (int i = 1; i <= a.d; ++i) s += a[i] * b[i];
    return s;
}

// Put the point back on the sheet <x,x> = -1 after arithmetic drift, by
// recomputing the time component from the spatial ones.  Evaluating the
// quadratic form directly would cancel catastrophically far from the base
// point; the graph projection is exact at every scale.
inline void renormalize(Point& p) {
    if (!(p.x[0] > 0)) throw std::domain_error("renormalize: point not on the upper sheet");
    double n2 = 0.0;
    for (int i = 1; i <= p.d; ++i) n2 += p.x[std::size_t(i)] * p.x[std::size_t(i)];
    double t = std::sqrt(1.0 + n2);
    if (!(std::fabs(p.x[0] - t) <= 1e-6 * t)) throw std::domain_error("renormalize: point drifted off the sheet");
    p.x[0] = t;
}

// cosh of the distance, evaluated without cancellation when x and y are close:
// -<x,y> = 1 + <x-y,x-y>/2 and the difference components are themselves small.
inline double cosh_dist(const Point& a, const Point& b) {
    double m = -mink(a, b);
    if (m < 1.5) {
        double q = -(a[0] - b[0]) * (a[0] - b[0]);
        for (int i = 1; i <= a.d; ++i) q += (a[i] - b[i]) * (a[i] - b[i]);
        m = 1.0 + 0.5 * q;
        if (m < 1.0 - 1e-9) throw std::domain_error("cosh_dist: inputs off the hyperboloid sheet");
    }
    return m < 1.0 ? 1.0 : m;
}

inline double dist(const Point& a, const Point& b) {
    double m = cosh_dist(a, b);
    double e = m - 1.0;
    // acosh(1+e) = log1p(e + sqrt(e(2+e))), stable for all e >= 0.
    return std::log1p(e + std::sqrt(e * (2.0 + e)));
}

// Geodesic from x with unit direction u (tangent at x), arc length s.
inline Point exp_map(const Point& x, const TangentVec& u, double s) {
    if (std::fabs(mink(u, u) - 1.0) > 1e-6 || std::fabs(mink(x, u)) > 1e-6 * std::fabs(x[0]))
        throw std::domain_error("exp_map: u must be a unit tangent vector at x");
    Point r;
    r.d = x.d;
    double ch = std::cosh(s), sh = std::sinh(s);
    for (int i = 0; i <= x.d; ++i) r[i] = ch * x[i] + sh * u[i];
    renormalize(r);
    return r;
}

// Unit tangent at p whose spatial part is the given Euclidean unit vector.
inline TangentVec direction_at_base(int d, const std::array<double, max_dim>& dir) {
    check_dim(d);
    TangentVec v;
    v.d = d;
    for (int i = 0; i < d; ++i) v[i + 1] = dir[std::size_t(i)];
    return v;
}

}  // namespace hypbool
