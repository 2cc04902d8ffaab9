#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature.  Intervals are kept in a
// worst-error-first heap and bisected until the summed error estimate meets
// the absolute tolerance or the evaluation budget runs out.

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace hypbool {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod abscissas (positive half) and weights; the embedded
// 7-point Gauss rule uses the odd-indexed nodes.
inline constexpr double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(F&& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * gk_x[i]);
        fv[14 - i] = f(c + h * gk_x[i]);
    }
    double kron = gk_wk[7] * fv[7], gauss = gk_wg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += gk_wk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += gk_wg[i / 2] * (fv[i] + fv[14 - i]);
    }
    value = kron * h;
    if (!std::isfinite(value)) throw std::runtime_error("quadrature: integrand not finite");

    // QUADPACK-style error sharpening against the scale of f's variation.
    double mean = 0.5 * kron;
    double resasc = gk_wk[7] * std::fabs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += gk_wk[i] * (std::fabs(fv[i] - mean) + std::fabs(fv[14 - i] - mean));
    resasc *= std::fabs(h);
    err = std::fabs((kron - gauss) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

// Integrate f over consecutive segments [pts[0],pts[1]],[pts[1],pts[2]],...
// Breakpoints should include integrand kinks and support edges.
template <class F>
QuadResult integrate_segments(F&& f, const std::vector<double>& pts,
                              double abs_tol = 1e-10, long max_evals = 1000000) {
    QuadResult res;
    std::priority_queue<detail::Segment> heap;
    double sum = 0.0, esum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i] < pts[i + 1])) continue;
        detail::Segment s{pts[i], pts[i + 1], 0, 0};
        detail::gk15(f, s.a, s.b, s.value, s.error);
        res.evals += 15;
        sum += s.value;
        esum += s.error;
        heap.push(s);
    }
    while (!heap.empty() && esum > abs_tol && res.evals + 30 <= max_evals) {
        detail::Segment worst = heap.top();
        double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) break;  // interval at roundoff width
        heap.pop();
        sum -= worst.value;
        esum -= worst.error;
        detail::Segment l{worst.a, m, 0, 0}, r{m, worst.b, 0, 0};
        detail::gk15(f, l.a, l.b, l.value, l.error);
        detail::gk15(f, r.a, r.b, r.value, r.error);
        res.evals += 30;
        sum += l.value + r.value;
        esum += l.error + r.error;
        heap.push(l);
        heap.push(r);
    }
    res.value = sum;
    res.error = esum;
    res.converged = esum <= abs_tol;
    return res;
}

template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b,
                              double abs_tol = 1e-10, long max_evals = 1000000) {
    return integrate_segments(f, std::vector<double>{a, b}, abs_tol, max_evals);
}

// Throwing convenience wrapper; most callers treat non-convergence as fatal.
template <class F>
double integrate(F&& f, double a, double b,
                 double abs_tol = 1e-10, long max_evals = 1000000) {
    QuadResult r = integrate_adaptive(f, a, b, abs_tol, max_evals);
    if (!r.converged) throw std::runtime_error("quadrature: tolerance not reached within evaluation budget");
    return r.value;
}

template <class F>
double integrate_pts(F&& f, const std::vector<double>& pts,
                     double abs_tol = 1e-10, long max_evals = 1000000) {
    QuadResult r = integrate_segments(f, pts, abs_tol, max_evals);
    if (!r.converged) throw std::runtime_error("quadrature: tolerance not reached within evaluation budget");
    return r.value;
}

}  // namespace hypbool
