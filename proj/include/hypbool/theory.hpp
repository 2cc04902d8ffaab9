#pragma once

// Closed-form and quadrature evaluation of the model's moment formulas:
// grain moments, mean values of the geometric functionals, the grain
// covariogram, exact and asymptotic variances and covariances, horoball
// measure integrals, and integral-geometric identity checks.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "geometry.hpp"
#include "horoball.hpp"
#include "interp.hpp"
#include "lens.hpp"
#include "point.hpp"
#include "process.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace hypbool {

// Moments of the typical grain: v[j] = E V_j(G) for j = 0..d together with
// the renormalized v0[j] = renorm_const(d, j) v[j].  vbar2 = E Vol(B(G,1))^2
// witnesses the square integrability the second-order formulas require.
struct GrainMoments {
    int d = 2;
    std::vector<double> v;
    std::vector<double> v0;
    double vbar2 = 0.0;
};

inline GrainMoments grain_moments(const ModelParams& params) {
    check_params(params);
    const int d = params.d;
    const double rmax = params.radius.r_max();
    GrainMoments gm;
    gm.d = d;
    gm.v.resize(d + 1);
    gm.v0.resize(d + 1);
    for (int j = 0; j <= d; ++j) {
        double scale = std::max(1.0, intrinsic_volume_ball(d, j, rmax));
        gm.v[j] = params.radius.expect(
            [&](double r) { return intrinsic_volume_ball(d, j, r); }, 1e-12 * scale);
        gm.v0[j] = renorm_const(d, j) * gm.v[j];
    }
    double scale2 = std::max(1.0, ball_volume(d, rmax + 1.0));
    gm.vbar2 = params.radius.expect(
        [&](double r) {
            double vb = ball_volume(d, r + 1.0);
            return vb * vb;
        },
        1e-12 * scale2 * scale2);
    return gm;
}

// Covariogram of the typical grain, C(s) = E Vol(G cap (G translated by s)),
// tabulated on a uniform grid over [0, 2 r_max] and interpolated monotonically
// so that the tail stays nonnegative and non-increasing.
struct CovariogramTable {
    std::vector<double> grid;
    std::vector<double> values;
    MonotoneCubic spline;

    double support() const { return grid.empty() ? 0.0 : grid.back(); }

    double operator()(double s) const {
        if (s < 0) throw std::invalid_argument("CovariogramTable: s >= 0");
        if (grid.empty() || s >= grid.back()) return 0.0;
        return std::max(0.0, spline(s));
    }
};

inline CovariogramTable covariogram(const ModelParams& params, int n_nodes = 257) {
    check_params(params);
    if (n_nodes < 2) throw std::invalid_argument("covariogram: n_nodes >= 2");
    const int d = params.d;
    const double rmax = params.radius.r_max();
    const double smax = 2.0 * rmax;
    const double scale = std::max(1.0, ball_volume(d, rmax));
    CovariogramTable tab;
    tab.grid.resize(n_nodes);
    tab.values.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        double s = smax * double(i) / double(n_nodes - 1);
        tab.grid[i] = s;
        tab.values[i] = params.radius.expect(
            [&](double u) { return lens_volume(d, u, u, s); }, 1e-12 * scale);
    }
    tab.values.back() = 0.0;
    tab.spline = MonotoneCubic(tab.grid, tab.values);
    return tab;
}

// Mean volume of the occupied set inside a window of volume w_vol.
inline double mean_volume(double w_vol, const GrainMoments& gm, double gamma) {
    if (w_vol < 0) throw std::invalid_argument("mean_volume: w_vol >= 0");
    if (gamma < 0) throw std::invalid_argument("mean_volume: gamma >= 0");
    return w_vol * -std::expm1(-gamma * gm.v[gm.d]);
}

// Mean boundary content of the occupied set inside a window with volume w_vol
// and boundary content w_surf.
inline double mean_surface(double w_vol, double w_surf, const GrainMoments& gm, double gamma) {
    if (w_vol < 0 || w_surf < 0) throw std::invalid_argument("mean_surface: window data >= 0");
    if (gamma < 0) throw std::invalid_argument("mean_surface: gamma >= 0");
    const double q = std::exp(-gamma * gm.v[gm.d]);
    return w_vol * gamma * gm.v[gm.d - 1] * q + w_surf * -std::expm1(-gamma * gm.v[gm.d]);
}

namespace detail {

// Sum over ordered tuples (m_1, ..., m_s) with entries in [k, d-1] and
// m_1 + ... + m_s = target of the products v0[m_1] ... v0[m_s].
inline double v0_tuple_sum(const std::vector<double>& v0, int k, int d, int s, int target) {
    if (s == 0) return target == 0 ? 1.0 : 0.0;
    double total = 0.0;
    for (int m = k; m <= d - 1; ++m) {
        int rest = target - m;
        if (rest < (s - 1) * k || rest > (s - 1) * (d - 1)) continue;
        total += v0[m] * v0_tuple_sum(v0, k, d, s - 1, rest);
    }
    return total;
}

// Alternating grain series sum_{s=1}^{m-k} (-1)^{s-1} gamma^s / s! times the
// tuple sum at target s d + k - m.  This is the coefficient multiplying the
// window term of order m in the mean-value expansions.
inline double alternating_grain_series(const std::vector<double>& v0, int k, int d, int m, double gamma) {
    double total = 0.0, gpow = 1.0;
    for (int s = 1; s <= m - k; ++s) {
        gpow *= gamma / double(s);
        double sign = (s % 2 == 1) ? 1.0 : -1.0;
        total += sign * gpow * v0_tuple_sum(v0, k, d, s, s * d + k - m);
    }
    return total;
}

}  // namespace detail

// Mean of the renormalized intrinsic volume V_k^0 of the occupied set inside
// a convex window whose renormalized intrinsic volumes are w_v0[0..d].
inline double mean_intrinsic_k0(int k, const std::vector<double>& w_v0,
                                const GrainMoments& gm, double gamma) {
    const int d = gm.d;
    if (k < 0 || k > d - 1) throw std::invalid_argument("mean_intrinsic_k0: 0 <= k <= d-1");
    if (int(w_v0.size()) != d + 1)
        throw std::invalid_argument("mean_intrinsic_k0: window table needs entries 0..d");
    if (gamma < 0) throw std::invalid_argument("mean_intrinsic_k0: gamma >= 0");
    const double q = std::exp(-gamma * gm.v[d]);
    double out = w_v0[k] * -std::expm1(-gamma * gm.v[d]);
    for (int m = k + 1; m <= d; ++m)
        out += q * w_v0[m] * detail::alternating_grain_series(gm.v0, k, d, m, gamma);
    return out;
}

// Asymptotic density of V_k: the large-window limit of E V_k(Z cap B_R)
// divided by Vol(B_R), for 0 <= k <= d-1.
inline double asymptotic_density_k(int k, const GrainMoments& gm, double gamma) {
    const int d = gm.d;
    if (k < 0 || k > d - 1) throw std::invalid_argument("asymptotic_density_k: 0 <= k <= d-1");
    if (gamma < 0) throw std::invalid_argument("asymptotic_density_k: gamma >= 0");
    const double q = std::exp(-gamma * gm.v[d]);
    const double denom = unit_ball_volume(k) * unit_ball_volume(d - 1 - k);
    double out = (d - 1) * -std::expm1(-gamma * gm.v[d]);
    for (int m = k + 1; m <= d; ++m) {
        double b = (m < d)
            ? (d - 1) * unit_ball_volume(m) * unit_ball_volume(d - 1 - m) / denom
            : (d / pi) * unit_ball_volume(d) / denom;
        out += q * b * detail::alternating_grain_series(gm.v0, k, d, m, gamma);
    }
    return out;
}

// Mean Euler characteristic of the occupied set inside a convex planar window
// with perimeter w_v1 and area w_v2.  Only defined for d = 2.
inline double mean_euler_2d(double w_v1, double w_v2, const GrainMoments& gm, double gamma) {
    if (gm.d != 2) throw std::invalid_argument("mean_euler_2d: d = 2 only");
    if (w_v1 < 0 || w_v2 < 0) throw std::invalid_argument("mean_euler_2d: window data >= 0");
    if (gamma < 0) throw std::invalid_argument("mean_euler_2d: gamma >= 0");
    const double v1 = gm.v[1], v2 = gm.v[2];
    const double q = std::exp(-gamma * v2);
    return -std::expm1(-gamma * v2) + w_v1 * q * gamma * v1 / (2.0 * pi)
         + w_v2 * q * (gamma + gamma * v2 / (2.0 * pi) - gamma * gamma * v1 * v1 / (4.0 * pi));
}

namespace detail {

// omega_d times the radial integral of (e^{gamma C(s)} - 1) weight(s)
// sinh^{d-1}(s) over the covariogram support.
template <class W>
inline double excess_pair_integral(int d, double gamma, const CovariogramTable& cov,
                                   W&& weight, double tol) {
    const double smax = cov.support();
    if (smax <= 0 || gamma == 0) return 0.0;
    double integral = integrate(
        [&](double s) {
            return std::expm1(gamma * cov(s)) * weight(s) * std::pow(std::sinh(s), d - 1);
        },
        0.0, smax, tol);
    return unit_sphere_area(d) * integral;
}

}  // namespace detail

// Variance of the occupied volume inside the window B_R.
inline double var_volume_exact(const ModelParams& params, double R) {
    check_params(params);
    if (R <= 0) throw std::invalid_argument("var_volume_exact: R > 0");
    const int d = params.d;
    GrainMoments gm = grain_moments(params);
    CovariogramTable cov = covariogram(params);
    const double mag = std::expm1(params.gamma * gm.v[d])
                     * std::pow(std::sinh(cov.support()), d - 1.0) * ball_volume(d, R);
    double integral = detail::excess_pair_integral(
        d, params.gamma, cov, [&](double s) { return lens_volume(d, R, R, s); },
        1e-10 * std::max(1.0, mag));
    return std::exp(-2.0 * params.gamma * gm.v[d]) * integral;
}

// Large-window limit of Var Vol(Z cap B_R) / Vol(B_R): the window covariogram
// is replaced by the hitting probability of the limiting random horoball.
inline double var_volume_asymptotic(const ModelParams& params) {
    check_params(params);
    const int d = params.d;
    GrainMoments gm = grain_moments(params);
    CovariogramTable cov = covariogram(params);
    const double mag = std::expm1(params.gamma * gm.v[d])
                     * std::pow(std::sinh(cov.support()), d - 1.0);
    double integral = detail::excess_pair_integral(
        d, params.gamma, cov, [&](double s) { return horoball_hit_prob(d, s); },
        1e-10 * std::max(1.0, mag));
    return std::exp(-2.0 * params.gamma * gm.v[d]) * integral;
}

// Total mass of horoballs containing both y and z under the invariant horoball
// measure.  The height integral is closed-form, leaving a direction integral
//   (1 / omega_d) int_{S^{d-1}} max(w_y(u), w_z(u))^{-(d-1)} dH(u)
// with w_x(u) = e^{-dist(p,x)} + (1 - cos angle(u, x)) sinh dist(p,x), which is
// evaluated adaptively with evaluation budget n_mc.
inline double horoball_pair_weight(const Point& y, const Point& z, long n_mc = 200000) {
    if (y.d != z.d) throw std::invalid_argument("horoball_pair_weight: dimension mismatch");
    if (n_mc < 100) throw std::invalid_argument("horoball_pair_weight: n_mc >= 100");
    const int d = y.d;

    double ny2 = 0.0, nz2 = 0.0;
    for (int i = 1; i <= d; ++i) {
        ny2 += y[i] * y[i];
        nz2 += z[i] * z[i];
    }
    const double ny = std::sqrt(ny2), nz = std::sqrt(nz2);
    // Sheet identity: e^{-dist} = 1 / (x0 + |xbar|), sinh dist = |xbar|.
    const double ey = 1.0 / (y[0] + ny), ez = 1.0 / (z[0] + nz);
    const double bound = std::pow(1.0 / std::max(ey, ez), d - 1.0);
    const double tol = 1e-12 * std::max(1.0, bound);

    if (d == 2) {
        const double ay = ny > 0 ? std::atan2(y[2], y[1]) : 0.0;
        const double az = nz > 0 ? std::atan2(z[2], z[1]) : 0.0;
        auto f = [&](double phi) {
            double wy = ey + (1.0 - std::cos(phi - ay)) * ny;
            double wz = ez + (1.0 - std::cos(phi - az)) * nz;
            return 1.0 / std::max(wy, wz);
        };
        std::vector<double> pts{0.0, 2.0 * pi};
        for (double a : {ay, az}) {
            double t = std::fmod(a + 2.0 * pi, 2.0 * pi);
            if (t > 1e-12 && t < 2.0 * pi - 1e-12) pts.push_back(t);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return integrate_pts(f, pts, tol * 2.0 * pi, n_mc) / (2.0 * pi);
    }

    // Directions relative to an orthonormal pair spanning the two points: the
    // integrand depends on u only through its angles to both, so the sphere
    // integral reduces to the polar pair (theta, phi) with an S^{d-3} factor.
    double vy[max_dim] = {0.0}, vz[max_dim] = {0.0};
    if (ny > 1e-150) for (int i = 0; i < d; ++i) vy[i] = y[i + 1] / ny;
    else vy[0] = 1.0;
    if (nz > 1e-150) for (int i = 0; i < d; ++i) vz[i] = z[i + 1] / nz;
    else vz[0] = 1.0;
    double cb = 0.0;
    for (int i = 0; i < d; ++i) cb += vy[i] * vz[i];
    cb = std::clamp(cb, -1.0, 1.0);
    double perp[max_dim] = {0.0};
    double np2 = 0.0;
    for (int i = 0; i < d; ++i) {
        perp[i] = vz[i] - cb * vy[i];
        np2 += perp[i] * perp[i];
    }
    const double sb = std::sqrt(np2);

    auto f = [&](double theta, double phi) {
        double cy = std::cos(theta);
        double cz = cy * cb + std::sin(theta) * std::cos(phi) * sb;
        double wy = ey + (1.0 - cy) * ny;
        double wz = ez + (1.0 - cz) * nz;
        return std::pow(std::max(wy, wz), 1.0 - d);
    };
    auto outer = [&](double theta) {
        double st = std::sin(theta);
        double inner = integrate(
            [&](double phi) { return f(theta, phi) * std::pow(std::sin(phi), d - 3); },
            0.0, pi, tol, n_mc);
        return inner * std::pow(st, d - 2);
    };
    double integral = integrate(outer, 0.0, pi, tol * pi, n_mc);
    return unit_sphere_area(d - 2) * integral / unit_sphere_area(d);
}

// Covariance-type estimate assembled from two quadrature terms and one
// Monte Carlo term; std_error is the Monte Carlo error of term2.
struct CovarianceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double term1 = 0.0;
    double term2 = 0.0;
    double term3 = 0.0;
    long n_samples = 0;
};

namespace detail {

// Stratified Monte Carlo mean of sphere_area(U) ball_volume(U) kern(y, z)
// with U the grain radius, y uniform on the radius-U sphere and z uniform in
// the radius-U ball, both about the base point.
template <class Kernel>
inline void surface_volume_pair_mc(const ModelParams& params, long n_mc,
                                   unsigned long long seed, Kernel&& kern,
                                   double& mean, double& se, long& n_used) {
    const int d = params.d;
    const bool fixed = params.radius.kind == RadiusDistribution::Kind::fixed;
    const long n_strata = fixed ? 1 : 16;
    const long per = std::max<long>(2, n_mc / n_strata);
    const Point base = base_point(d);
    const double a = params.radius.a, width = params.radius.b - params.radius.a;
    mean = 0.0;
    double var_sum = 0.0;
    for (long k = 0; k < n_strata; ++k) {
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<unsigned long long>(k));
        double sum = 0.0, sum2 = 0.0;
        for (long i = 0; i < per; ++i) {
            double u = fixed ? a : a + width * (double(k) + rng.uniform01()) / double(n_strata);
            Point yy = sample_sphere(base, u, rng);
            Point zz = sample_uniform_ball_at_base(d, u, rng);
            double h = sphere_area(d, u) * ball_volume(d, u) * kern(yy, zz);
            sum += h;
            sum2 += h * h;
        }
        double m = sum / double(per);
        double v = std::max(0.0, sum2 - double(per) * m * m) / double(per - 1);
        mean += m / double(n_strata);
        var_sum += v / double(per) / double(n_strata * n_strata);
    }
    se = std::sqrt(var_sum);
    n_used = n_strata * per;
}

// Table of lens_volume(d, R, R, s) over [0, smax] for fast kernel lookups.
inline MonotoneCubic window_overlap_table(int d, double R, double smax, int n_nodes = 257) {
    std::vector<double> xs(n_nodes), ys(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        xs[i] = smax * double(i) / double(n_nodes - 1);
        ys[i] = lens_volume(d, R, R, xs[i]);
    }
    return MonotoneCubic(std::move(xs), std::move(ys));
}

}  // namespace detail

// Covariance of boundary content and volume of the occupied set inside B_R:
// term1 pairs two volume points through a common grain, term2 pairs a
// boundary point and a volume point on one grain (Monte Carlo), term3 pairs
// a window-boundary point with an interior point.
inline CovarianceEstimate cov_surf_vol_local(const ModelParams& params, double R, long n_mc,
                                             unsigned long long seed = 0x73766c6fULL) {
    check_params(params);
    if (R <= 0) throw std::invalid_argument("cov_surf_vol_local: R > 0");
    if (n_mc < 10000) throw std::invalid_argument("cov_surf_vol_local: n_mc >= 10000");
    const int d = params.d;
    const double g = params.gamma;
    GrainMoments gm = grain_moments(params);
    CovariogramTable cov = covariogram(params);
    const double q2 = std::exp(-2.0 * g * gm.v[d]);
    const double smax = cov.support();
    CovarianceEstimate out;
    if (g == 0) return out;

    const double mag = std::expm1(g * gm.v[d]) * std::pow(std::sinh(smax), d - 1.0);
    double var_int = detail::excess_pair_integral(
        d, g, cov, [&](double s) { return lens_volume(d, R, R, s); },
        1e-10 * std::max(1.0, mag * ball_volume(d, R)));
    out.term1 = -g * gm.v[d - 1] * q2 * var_int;

    MonotoneCubic overlap = detail::window_overlap_table(d, R, smax);
    double mc_mean = 0.0, mc_se = 0.0;
    detail::surface_volume_pair_mc(
        params, n_mc, seed,
        [&](const Point& a, const Point& b) {
            double s = dist(a, b);
            return std::exp(g * cov(s)) * std::max(0.0, overlap(s));
        },
        mc_mean, mc_se, out.n_samples);
    out.term2 = g * q2 * mc_mean;
    out.std_error = g * q2 * mc_se;

    // Fraction of directions at a boundary point that stay inside the window
    // at distance s: a cap with cos theta* = tanh(s/2) / tanh(R).
    const double cut = std::tanh(R);
    double t3 = integrate(
        [&](double s) {
            double cstar = std::clamp(std::tanh(0.5 * s) / cut, 0.0, 1.0);
            return std::expm1(g * cov(s)) * std::pow(std::sinh(s), d - 1)
                 * sin_pow_integral(d - 2, std::acos(cstar));
        },
        0.0, smax, 1e-10 * std::max(1.0, mag * pi));
    out.term3 = q2 * sphere_area(d, R) * unit_sphere_area(d - 1) * t3;

    out.value = out.term1 + out.term2 + out.term3;
    return out;
}

// Large-window limit of Cov(V_{d-1}, V_d)(Z cap B_R) / Vol(B_R): the window
// pairings of cov_surf_vol_local are replaced by horoball-measure weights.
inline CovarianceEstimate cov_surf_vol_asymptotic(const ModelParams& params, long n_mc,
                                                  unsigned long long seed = 0x73766c61ULL) {
    check_params(params);
    if (n_mc < 10000) throw std::invalid_argument("cov_surf_vol_asymptotic: n_mc >= 10000");
    const int d = params.d;
    const double g = params.gamma;
    GrainMoments gm = grain_moments(params);
    CovariogramTable cov = covariogram(params);
    const double q2 = std::exp(-2.0 * g * gm.v[d]);
    const double smax = cov.support();
    CovarianceEstimate out;
    if (g == 0) return out;

    const double mag = std::expm1(g * gm.v[d]) * std::pow(std::sinh(smax), d - 1.0);
    double var_int = detail::excess_pair_integral(
        d, g, cov, [&](double s) { return horoball_hit_prob(d, s); },
        1e-10 * std::max(1.0, mag));
    out.term1 = -g * gm.v[d - 1] * q2 * var_int;

    double mc_mean = 0.0, mc_se = 0.0;
    detail::surface_volume_pair_mc(
        params, n_mc, seed,
        [&](const Point& a, const Point& b) {
            double s = dist(a, b);
            return std::exp(g * cov(s)) * horoball_pair_weight(a, b, 50000);
        },
        mc_mean, mc_se, out.n_samples);
    out.term2 = g * q2 * mc_mean;
    out.std_error = g * q2 * mc_se;

    // Directions at a horoball boundary point that stay inside the horoball
    // at distance s: a cap with cos theta* = tanh(s/2).
    double t3 = integrate(
        [&](double s) {
            double cstar = std::tanh(0.5 * s);
            return std::expm1(g * cov(s)) * std::pow(std::sinh(s), d - 1)
                 * sin_pow_integral(d - 2, std::acos(cstar));
        },
        0.0, smax, 1e-10 * std::max(1.0, mag * pi));
    out.term3 = (d - 1) * q2 * unit_sphere_area(d - 1) * t3;

    out.value = out.term1 + out.term2 + out.term3;
    return out;
}

struct KinematicReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
};

// Checks the integral-geometric product formula for two balls: the isometry
// integral of a functional of the intersection (left) against products of
// the balls' functionals (right).  k = d compares volumes, k = d-1 boundary
// contents, and k = 0 (d = 2 only) the Euler-type content 2 pi + area.
inline KinematicReport kinematic_check(int d, int k, double r_a, double r_b) {
    check_dim(d);
    if (r_a <= 0 || r_b <= 0) throw std::invalid_argument("kinematic_check: positive radii");
    if (!(k == d || k == d - 1 || (d == 2 && k == 0)))
        throw std::invalid_argument("kinematic_check: k must be d, d-1, or 0 with d = 2");

    auto phi = [&](double s) -> double {
        if (k == d) return lens_volume(d, r_a, r_b, s);
        if (k == d - 1) return lens_surface(d, r_a, r_b, s);
        return 2.0 * pi + lens_volume(d, r_a, r_b, s);
    };
    std::vector<double> pts{0.0};
    double mid = std::fabs(r_a - r_b), top = r_a + r_b;
    if (mid > 0.0 && mid < top) pts.push_back(mid);
    pts.push_back(top);
    const double scale = std::max(
        1.0, ball_volume(d, std::max(r_a, r_b)) * std::pow(std::sinh(top), d - 1.0));
    double lhs_int = integrate_pts(
        [&](double s) { return phi(s) * std::pow(std::sinh(s), d - 1); }, pts, 1e-12 * scale);

    KinematicReport rep;
    rep.lhs = unit_sphere_area(d) * lhs_int;
    if (k == d) {
        rep.rhs = ball_volume(d, r_a) * ball_volume(d, r_b);
    } else if (k == d - 1) {
        rep.rhs = sphere_area(d, r_a) * ball_volume(d, r_b)
                + ball_volume(d, r_a) * sphere_area(d, r_b);
    } else {
        for (int i = 0; i <= d; ++i) {
            int j = d + k - i;
            if (j < 0 || j > d) continue;
            rep.rhs += renorm_const(d, i) * intrinsic_volume_ball(d, i, r_a)
                     * renorm_const(d, j) * intrinsic_volume_ball(d, j, r_b);
        }
    }
    rep.rel_error = std::fabs(rep.lhs - rep.rhs)
                  / std::max(std::fabs(rep.lhs), std::fabs(rep.rhs));
    return rep;
}

}  // namespace hypbool
