#pragma once

// Economic covering of H^d by balls of radius 1/2, indexed over half-space
// coordinates: the ball centers are (7/8)^ell (2ak, 1) for k in Z^{d-1} and
// ell in Z.  The module enumerates, for a query point, every covering ball
// containing it, and verifies the box inclusions
//   C^{d-1}(z, au) x [7u/8, u]  subset  B((z,u), 1/2)  subset
//   C^{d-1}(z, 32u) x [u/256, 256u]
// that drive the coverage and bounded-overlap arguments.

#include "models.hpp"
#include "parallel.hpp"
#include "point.hpp"
#include "rng.hpp"
#include "sampling.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace hypbool {

inline double constant_a(int d) {
    check_dim(d);
    double sh = std::sinh(0.25);
    return std::sqrt((3.5 * sh * sh - 1.0 / 64.0) / (d - 1));
}

struct CoverIndex {
    int d = 2;
    std::array<long, max_dim> k{};  // entries 0..d-2 are used
    long ell = 0;
};

inline HalfSpaceCoords cover_center(const CoverIndex& idx) {
    check_dim(idx.d);
    double u = std::pow(7.0 / 8.0, double(idx.ell));
    double spacing = 2.0 * constant_a(idx.d) * u;
    HalfSpaceCoords c;
    c.d = idx.d;
    for (int i = 0; i < idx.d - 1; ++i) c[i] = spacing * double(idx.k[std::size_t(i)]);
    c[idx.d - 1] = u;
    return c;
}

inline Point cover_center_point(const CoverIndex& idx) { return from_half_space(cover_center(idx)); }

// Every covering index whose ball of radius 1/2 contains y.  The level search
// window around log_{7/8}(y_d) is +-60, ten levels wider than the +-50
// bracket that bounds the overlap; a ball at level ell can contain y only if
// (y_d - u)^2 <= 4 sinh^2(1/4) u y_d with u = (7/8)^ell, which restricts
// u/y_d to [e^{-1/2}, e^{1/2}] and the lateral index to a small box.
inline std::vector<CoverIndex> covers(const HalfSpaceCoords& y) {
    const int d = y.d;
    check_dim(d);
    if (!(y.height() > 0.0)) throw std::invalid_argument("covers: positive height required");
    const double a = constant_a(d);
    const double sh2 = std::sinh(0.25) * std::sinh(0.25);
    const double yd = y.height();
    const long center_ell = std::lround(std::log(yd) / std::log(7.0 / 8.0));
    std::vector<CoverIndex> found;
    for (long ell = center_ell - 60; ell <= center_ell + 60; ++ell) {
        const double u = std::pow(7.0 / 8.0, double(ell));
        const double reach2 = 4.0 * sh2 * u * yd - (yd - u) * (yd - u);
        if (reach2 < 0.0) continue;
        const double reach = std::sqrt(reach2), spacing = 2.0 * a * u;
        std::array<long, max_dim> lo{}, hi{};
        bool empty = false;
        for (int i = 0; i < d - 1; ++i) {
            lo[std::size_t(i)] = (long)std::ceil((y[i] - reach) / spacing);
            hi[std::size_t(i)] = (long)std::floor((y[i] + reach) / spacing);
            if (lo[std::size_t(i)] > hi[std::size_t(i)]) empty = true;
        }
        if (empty) continue;
        CoverIndex idx;
        idx.d = d;
        idx.ell = ell;
        idx.k = lo;
        for (;;) {
            double q2 = (yd - u) * (yd - u);
            for (int i = 0; i < d - 1; ++i) {
                double diff = y[i] - spacing * double(idx.k[std::size_t(i)]);
                q2 += diff * diff;
            }
            if (q2 <= 4.0 * sh2 * u * yd) found.push_back(idx);
            int i = 0;
            while (i < d - 1 && ++idx.k[std::size_t(i)] > hi[std::size_t(i)]) {
                idx.k[std::size_t(i)] = lo[std::size_t(i)];
                ++i;
            }
            if (i == d - 1) break;
        }
    }
    if (found.empty()) throw std::runtime_error("covers: point not covered (coverage violation)");
    return found;
}

// Verify the two box inclusions at (z, u): all corners of the inner box plus
// random interior points lie in the ball (corners suffice by convexity; the
// random points are insurance), and random points of the ball lie in the
// outer box.
inline bool box_inclusion_check(int d, const std::array<double, max_dim>& z, double u, SplitMix64& rng,
                                int n_random = 1000) {
    check_dim(d);
    if (!(u > 0.0)) throw std::invalid_argument("box_inclusion_check: u > 0 required");
    const double a = constant_a(d);
    HalfSpaceCoords center;
    center.d = d;
    for (int i = 0; i < d - 1; ++i) center[i] = z[std::size_t(i)];
    center[d - 1] = u;

    // The inner-box corners lie exactly on the bounding sphere (the lateral
    // half-width is defined by that equality), so the comparison carries
    // rounding slack.
    auto in_ball = [&](const HalfSpaceCoords& x) { return half_space_dist(center, x) <= 0.5 + 1e-9; };

    HalfSpaceCoords corner;
    corner.d = d;
    for (int mask = 0; mask < (1 << d); ++mask) {
        for (int i = 0; i < d - 1; ++i) corner[i] = z[std::size_t(i)] + ((mask >> i) & 1 ? a * u : -a * u);
        corner[d - 1] = ((mask >> (d - 1)) & 1) ? u : 7.0 * u / 8.0;
        if (!in_ball(corner)) return false;
    }
    HalfSpaceCoords x;
    x.d = d;
    for (int it = 0; it < n_random; ++it) {
        for (int i = 0; i < d - 1; ++i) x[i] = z[std::size_t(i)] + rng.uniform(-a * u, a * u);
        x[d - 1] = rng.uniform(7.0 * u / 8.0, u);
        if (!in_ball(x)) return false;
    }

    Isometry to_center = translation_to(from_half_space(center));
    for (int it = 0; it < n_random; ++it) {
        Point s = sample_uniform_ball_at_base(d, 0.5, rng);
        HalfSpaceCoords y = to_half_space(apply(to_center, s));
        if (!(y.height() >= u / 256.0 && y.height() <= 256.0 * u)) return false;
        for (int i = 0; i < d - 1; ++i)
            if (std::fabs(y[i] - z[std::size_t(i)]) > 32.0 * u) return false;
    }
    return true;
}

struct CoverReport {
    long points_tested = 0;
    long coverage_failures = 0;
    long max_overlap = 0;
    std::map<int, long> decade_max_overlap;  // floor(log10 height) -> max overlap
    long box_checks = 0;
    long box_failures = 0;
};

// Scan: query points with log-uniform heights over [e^{-efolds}, e^{efolds}]
// and lateral coordinates uniform over +-10 heights (several grid spacings),
// plus box-inclusion checks with heights spread the same way.
inline CoverReport verify_covering(int d, long n_points, long n_boxes, std::uint64_t seed,
                                   double efolds = 20.0) {
    check_dim(d);
    CoverReport rep;
    const long chunk = 4096;
    const long n_chunks = (n_points + chunk - 1) / chunk;
    std::vector<CoverReport> parts{std::size_t(n_chunks)};
    parallel_for(n_chunks, [&](long c) {
        SplitMix64 rng = SplitMix64::stream(seed, std::uint64_t(c));
        CoverReport& part = parts[std::size_t(c)];
        HalfSpaceCoords y;
        y.d = d;
        for (long i = c * chunk; i < std::min(n_points, (c + 1) * chunk); ++i) {
            double h = std::exp(rng.uniform(-efolds, efolds));
            y[d - 1] = h;
            for (int j = 0; j < d - 1; ++j) y[j] = rng.uniform(-10.0 * h, 10.0 * h);
            long overlap = 0;
            try {
                overlap = long(covers(y).size());
            } catch (const std::runtime_error&) {
                ++part.coverage_failures;
            }
            ++part.points_tested;
            part.max_overlap = std::max(part.max_overlap, overlap);
            int decade = int(std::floor(std::log10(h)));
            long& dm = part.decade_max_overlap[decade];
            dm = std::max(dm, overlap);
        }
    });
    for (const CoverReport& part : parts) {
        rep.points_tested += part.points_tested;
        rep.coverage_failures += part.coverage_failures;
        rep.max_overlap = std::max(rep.max_overlap, part.max_overlap);
        for (auto& [decade, m] : part.decade_max_overlap) {
            long& dm = rep.decade_max_overlap[decade];
            dm = std::max(dm, m);
        }
    }
    std::vector<char> box_ok(std::size_t(n_boxes), 1);
    parallel_for(n_boxes, [&](long i) {
        SplitMix64 rng = SplitMix64::stream(seed ^ 0x626f786573ULL, std::uint64_t(i));
        double u = std::exp(rng.uniform(-efolds, efolds));
        std::array<double, max_dim> z{};
        for (int j = 0; j < d - 1; ++j) z[std::size_t(j)] = rng.uniform(-10.0 * u, 10.0 * u);
        box_ok[std::size_t(i)] = box_inclusion_check(d, z, u, rng, 100) ? 1 : 0;
    });
    rep.box_checks = n_boxes;
    for (char ok : box_ok)
        if (!ok) ++rep.box_failures;
    return rep;
}

}  // namespace hypbool
