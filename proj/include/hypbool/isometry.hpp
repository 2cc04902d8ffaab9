#pragma once

// Isometries of H^d as Lorentz matrices: M^T J M = J with J = diag(-1,1,...,1)
// and M[0][0] >= 1 (the orthochronous component preserving the upper sheet).

#include "point.hpp"
#include "rng.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace hypbool {

struct Isometry {
    int d = 2;
    // Row-major (d+1) x (d+1).
    std::array<double, (max_dim + 1) * (max_dim + 1)> m{};

    double at(int i, int j) const { return m[std::size_t(i * (d + 1) + j)]; }
    double& at(int i, int j) { return m[std::size_t(i * (d + 1) + j)]; }
};

inline Isometry identity_isometry(int d) {
    check_dim(d);
    Isometry iso;
    iso.d = d;
    for (int i = 0; i <= d; ++i) iso.at(i, i) = 1.0;
    return iso;
}

// Deviation of M^T J M from J, max-norm.
inline double lorentz_defect(const Isometry& iso) {
    const int n = iso.d + 1;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = -iso.at(0, i) * iso.at(0, j);
            for (int k = 1; k < n; ++k) s += iso.at(k, i) * iso.at(k, j);
            double target = (i == j) ? (i == 0 ? -1.0 : 1.0) : 0.0;
            worst = std::max(worst, std::fabs(s - target));
        }
    }
    return worst;
}

inline void check_isometry(const Isometry& iso, double tol = 1e-8) {
    if (lorentz_defect(iso) > tol) throw std::domain_error("isometry: M^T J M deviates from J");
    if (iso.at(0, 0) < 1.0 - 1e-12) throw std::domain_error("isometry: not orthochronous");
}

inline Isometry compose(const Isometry& a, const Isometry& b) {
    if (a.d != b.d) throw std::invalid_argument("compose: dimension mismatch");
    const int n = a.d + 1;
    Isometry r;
    r.d = a.d;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += a.at(i, k) * b.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

inline Point apply(const Isometry& iso, const Point& p) {
    if (iso.d != p.d) throw std::invalid_argument("apply: dimension mismatch");
    const int n = p.d + 1;
    Point r;
    r.d = p.d;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += iso.at(i, k) * p[k];
        r[i] = s;
    }
    renormalize(r);
    return r;
}

inline Isometry inverse(const Isometry& iso) {
    // J M^T J inverts a Lorentz matrix.
    const int n = iso.d + 1;
    Isometry r;
    r.d = iso.d;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double sign = ((i == 0) != (j == 0)) ? -1.0 : 1.0;
            r.at(i, j) = sign * iso.at(j, i);
        }
    return r;
}

// Hyperbolic translation moving the base point to x along their common
// geodesic: the symmetric boost [[x0, xbar^T], [xbar, I + xbar xbar^T/(1+x0)]].
inline Isometry translation_to(const Point& x) {
    Isometry iso;
    iso.d = x.d;
    iso.at(0, 0) = x[0];
    for (int i = 1; i <= x.d; ++i) {
        iso.at(0, i) = x[i];
        iso.at(i, 0) = x[i];
        for (int j = 1; j <= x.d; ++j)
            iso.at(i, j) = (i == j ? 1.0 : 0.0) + x[i] * x[j] / (1.0 + x[0]);
    }
    return iso;
}

// Haar-random element of the stabilizer of the base point: an orthogonal
// d x d block (rotations and reflections), embedded as diag(1, Q).  Gaussian
// matrix, Gram-Schmidt, then sign fixing against the diagonal.
inline Isometry random_rotation(int d, SplitMix64& rng) {
    check_dim(d);
    std::array<std::array<double, max_dim>, max_dim> a{};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a[std::size_t(i)][std::size_t(j)] = rng.normal();
    // Modified Gram-Schmidt on columns.
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += a[std::size_t(i)][std::size_t(j)] * a[std::size_t(i)][std::size_t(k)];
            for (int i = 0; i < d; ++i) a[std::size_t(i)][std::size_t(j)] -= dot * a[std::size_t(i)][std::size_t(k)];
        }
        double norm = 0.0;
        for (int i = 0; i < d; ++i) norm += a[std::size_t(i)][std::size_t(j)] * a[std::size_t(i)][std::size_t(j)];
        norm = std::sqrt(norm);
        if (norm < 1e-12) return random_rotation(d, rng);  // degenerate draw, retry
        for (int i = 0; i < d; ++i) a[std::size_t(i)][std::size_t(j)] /= norm;
    }
    Isometry iso;
    iso.d = d;
    iso.at(0, 0) = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) iso.at(i + 1, j + 1) = a[std::size_t(i)][std::size_t(j)];
    return iso;
}

}  // namespace hypbool
