#pragma once

// Nerve of the clipped grains {K_i intersect B_R} in the plane (d = 2).
// Hyperbolic discs are convex in the Beltrami-Klein model, where hyperbolic
// and Euclidean convexity coincide, so Helly's theorem applies: a subset S
// is a simplex iff every pair {i,j} of S meets inside the window and every
// triple of S has a common point.  Triple feasibility is decided in closed
// form: if all three pairs meet, a common point exists iff one is found
// among a finite witness set (disc centers, radial projections of a center
// onto another disc, and the crossing points of two boundary circles), the
// candidates exhausting the possible minimizers of distance from a center
// to the lens of the other two discs.

#include "geometry.hpp"
#include "point.hpp"
#include "process.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hypbool {

namespace detail {

constexpr double nerve_tol = 1e-9;

inline bool in_disc(const Point& x, const Grain& g) {
    return -mink(x, g.center) <= std::cosh(g.radius) * (1.0 + nerve_tol);
}

// Point at distance t from a along the geodesic through b.
inline Point along_geodesic(const Point& a, const Point& b, double t) {
    double ch = cosh_dist(a, b);
    double sh = std::sqrt(std::max(ch * ch - 1.0, 0.0));
    Point q = a;
    if (sh < 1e-12) return q;
    for (std::size_t i = 0; i < std::size_t(a.d) + 1; ++i) {
        double u = (b[i] - ch * a[i]) / sh;
        q[i] = std::cosh(t) * a[i] + std::sinh(t) * u;
    }
    return q;
}

}  // namespace detail

inline bool disc_pair_feasible(const Grain& A, const Grain& B) {
    return cosh_dist(A.center, B.center) <= std::cosh(A.radius + B.radius) * (1.0 + detail::nerve_tol);
}

inline bool disc_triple_feasible(const Grain& A, const Grain& B, const Grain& C) {
    check_dim(A.center.d);
    if (A.center.d != 2) throw std::invalid_argument("disc_triple_feasible: d = 2 only");
    if (!disc_pair_feasible(A, B) || !disc_pair_feasible(A, C) || !disc_pair_feasible(B, C))
        return false;
    const Grain* g[3] = {&A, &B, &C};

    for (int i = 0; i < 3; ++i)
        if (detail::in_disc(g[i]->center, *g[(i + 1) % 3]) && detail::in_disc(g[i]->center, *g[(i + 2) % 3]))
            return true;

    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            if (i == j) continue;
            int k = 3 - i - j;
            Point q = detail::along_geodesic(g[j]->center, g[i]->center, g[j]->radius);
            if (detail::in_disc(q, *g[i]) && detail::in_disc(q, *g[k])) return true;
        }

    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            int k = 3 - i - j;
            const Point& ci = g[i]->center;
            const Point& cj = g[j]->center;
            double ch_s = cosh_dist(ci, cj);
            double sh2 = ch_s * ch_s - 1.0;
            if (sh2 <= 0.0) continue;
            // x = alpha ci + beta cj + nu w with <x,ci> = -cosh r_i,
            // <x,cj> = -cosh r_j, <x,x> = -1, and w Minkowski-orthogonal to
            // both centers.
            double chi = std::cosh(g[i]->radius), chj = std::cosh(g[j]->radius);
            double alpha = (ch_s * chj - chi) / sh2;
            double beta = (ch_s * chi - chj) / sh2;
            double g0 = ci[1] * cj[2] - ci[2] * cj[1];
            double g1 = ci[2] * cj[0] - ci[0] * cj[2];
            double g2 = ci[0] * cj[1] - ci[1] * cj[0];
            Point w = ci;
            w[0] = -g0;
            w[1] = g1;
            w[2] = g2;
            double ww = -w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
            if (!(ww > 0.0)) continue;
            double q = alpha * alpha + beta * beta + 2.0 * alpha * beta * ch_s;
            double nu2 = (q - 1.0) / ww;
            if (nu2 < -detail::nerve_tol) continue;
            double nu = std::sqrt(std::max(nu2, 0.0));
            for (double sgn : {1.0, -1.0}) {
                Point x = ci;
                for (std::size_t c = 0; c < 3; ++c) x[c] = alpha * ci[c] + beta * cj[c] + sgn * nu * w[c];
                if (detail::in_disc(x, *g[std::size_t(k)])) return true;
            }
        }
    return false;
}

struct Nerve {
    std::vector<long> vertices;                // grain indices whose disc meets the window
    std::vector<std::vector<long>> simplices;  // index sets with a common point inside the window
};

// Does the family {K_i intersect B_R : i in subset} have a common point?
inline bool simplex_feasible(const Realization& real, const std::vector<long>& subset) {
    if (real.params.d != 2) throw std::invalid_argument("simplex_feasible: d = 2 only");
    const Grain window{base_point(2), real.window_radius};
    const std::vector<Grain>& gr = real.grains;
    for (long i : subset)
        if (i < 0 || i >= long(gr.size())) throw std::out_of_range("simplex_feasible: grain index");
    const std::size_t m = subset.size();
    if (m == 0) return false;
    if (m == 1) return disc_pair_feasible(gr[std::size_t(subset[0])], window);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            if (!disc_triple_feasible(gr[std::size_t(subset[a])], gr[std::size_t(subset[b])], window))
                return false;
            for (std::size_t c = b + 1; c < m; ++c)
                if (!disc_triple_feasible(gr[std::size_t(subset[a])], gr[std::size_t(subset[b])],
                                          gr[std::size_t(subset[c])]))
                    return false;
        }
    return true;
}

namespace detail {

struct NerveBuilder {
    const std::vector<Grain>& gr;
    Grain window;
    int cap;
    std::vector<long> verts;
    std::vector<std::vector<long>> adj;  // per vertex, larger neighbors (positions into verts)
    long euler = 0;
    std::vector<std::vector<long>>* out = nullptr;  // filled only when the full complex is wanted

    NerveBuilder(const Realization& real, int cap_) : gr(real.grains), cap(cap_) {
        if (real.params.d != 2) throw std::invalid_argument("nerve: d = 2 only");
        if (cap < 1) throw std::invalid_argument("nerve: cap >= 1 required");
        window = Grain{base_point(2), real.window_radius};
        for (long i = 0; i < long(gr.size()); ++i)
            if (disc_pair_feasible(gr[std::size_t(i)], window)) verts.push_back(i);
        adj.resize(verts.size());
        for (std::size_t a = 0; a < verts.size(); ++a)
            for (std::size_t b = a + 1; b < verts.size(); ++b) {
                const Grain& ga = gr[std::size_t(verts[a])];
                const Grain& gb = gr[std::size_t(verts[b])];
                if (disc_pair_feasible(ga, gb) && disc_triple_feasible(ga, gb, window))
                    adj[a].push_back(long(b));
            }
    }

    void run() {
        std::vector<long> stack;
        for (std::size_t a = 0; a < verts.size(); ++a) {
            stack.assign(1, long(a));
            record(stack);
            extend(stack, adj[a]);
        }
    }

    void record(const std::vector<long>& stack) {
        euler += (stack.size() % 2 == 1) ? 1 : -1;
        if (long(stack.size()) > cap)
            throw std::runtime_error("nerve: simplex dimension exceeds the cap of "
                                     + std::to_string(cap) + "; lower gamma or shrink the window");
        if (out) {
            std::vector<long> ids;
            ids.reserve(stack.size());
            for (long pos : stack) ids.push_back(verts[std::size_t(pos)]);
            out->push_back(std::move(ids));
        }
    }

    void extend(std::vector<long>& stack, const std::vector<long>& cand) {
        for (std::size_t ci = 0; ci < cand.size(); ++ci) {
            long b = cand[ci];
            bool ok = true;
            for (std::size_t x = 0; x < stack.size() && ok; ++x)
                for (std::size_t y = x + 1; y < stack.size() && ok; ++y)
                    ok = disc_triple_feasible(gr[std::size_t(verts[std::size_t(stack[x])])],
                                              gr[std::size_t(verts[std::size_t(stack[y])])],
                                              gr[std::size_t(verts[std::size_t(b)])]);
            if (!ok) continue;
            std::vector<long> next;
            const std::vector<long>& nb = adj[std::size_t(b)];
            std::set_intersection(cand.begin() + long(ci) + 1, cand.end(), nb.begin(), nb.end(),
                                  std::back_inserter(next));
            stack.push_back(b);
            record(stack);
            extend(stack, next);
            stack.pop_back();
        }
    }
};

}  // namespace detail

inline Nerve nerve_build(const Realization& real, int cap = 20) {
    detail::NerveBuilder nb(real, cap);
    Nerve nerve;
    nerve.vertices = nb.verts;
    nb.out = &nerve.simplices;
    nb.run();
    return nerve;
}

inline long euler_char_2d(const Realization& real, int cap = 20) {
    detail::NerveBuilder nb(real, cap);
    nb.run();
    return nb.euler;
}

}  // namespace hypbool
