// Acceptance battery: ten end-to-end checks of the toolkit, one PASS or FAIL
// line each.  Covers the mean-value formulas against hit-or-miss replicates,
// the exact and asymptotic window variances, the surface-volume covariance,
// normality of the volume estimator with a calibrated test, the height
// covering, the kinematic and Steiner identities, the mean-value series
// consistency, and the horoball machinery.  Exit code is the failure count.
//
// Stated runtime budgets assume eight hardware threads and are scaled up
// when fewer are available.

#include "hypbool/covering.hpp"
#include "hypbool/experiments.hpp"
#include "hypbool/horoball.hpp"
#include "hypbool/isometry.hpp"
#include "hypbool/lens.hpp"
#include "hypbool/sampling.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

using namespace hypbool;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

double budget_scale() { return std::max(1.0, 8.0 / double(thread_count())); }

int failures = 0;

void report(bool ok, int index, const char* text) {
    if (!ok) ++failures;
    std::printf("%s %2d  %s\n", ok ? "PASS" : "FAIL", index, text);
    std::fflush(stdout);
}

double mean_of(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    return m / double(x.size());
}

double var_of(const std::vector<double>& x, double m) {
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / double(x.size() - 1);
}

// Renormalized intrinsic volumes of a ball window, entries m = 0..d.
std::vector<double> ball_window_table(int d, double R) {
    std::vector<double> t(static_cast<std::size_t>(d) + 1);
    for (int m = 0; m <= d; ++m)
        t[std::size_t(m)] = renorm_const(d, m) * intrinsic_volume_ball(d, m, R);
    return t;
}

template <class F>
double riemann(F&& f, double a, double b, int n) {
    double h = (b - a) / n, sum = 0.0;
    for (int i = 0; i < n; ++i) sum += f(a + (i + 0.5) * h);
    return sum * h;
}

// Mean of the renormalized functional of index k via the alternating series
// over n-fold grain intersections, iterating the two-ball product map
// (M t)_k = sum_{m=k}^{d} v0[m] t[d+k-m] on the window table.
double series_oracle(int k, const std::vector<double>& window, const GrainMoments& gm,
                     double gamma) {
    const int d = gm.d;
    std::vector<double> t = window;
    double total = 0.0, coef = 1.0;
    for (int n = 1; n <= 12; ++n) {
        std::vector<double> nt(static_cast<std::size_t>(d) + 1, 0.0);
        for (int kk = 0; kk <= d; ++kk)
            for (int m = kk; m <= d; ++m)
                nt[std::size_t(kk)] += gm.v0[std::size_t(m)] * t[std::size_t(d + kk - m)];
        t = nt;
        coef *= gamma / n;
        total += (n % 2 ? 1.0 : -1.0) * coef * t[std::size_t(k)];
    }
    return total;
}

std::vector<double> synthetic_normal(long n, std::uint64_t seed, double mean, double sd) {
    SplitMix64 rng = SplitMix64::stream(seed, 0);
    std::vector<double> out;
    out.reserve(std::size_t(n));
    while (long(out.size()) < n) {
        double u1 = rng.uniform01(), u2 = rng.uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        out.push_back(mean + sd * r * std::cos(2.0 * pi * u2));
        if (long(out.size()) < n) out.push_back(mean + sd * r * std::sin(2.0 * pi * u2));
    }
    return out;
}

std::vector<double> synthetic_exponential(long n, std::uint64_t seed) {
    SplitMix64 rng = SplitMix64::stream(seed, 0);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = -std::log(rng.uniform01());
    return out;
}

// Reference planar configuration: 500 expected grains in a radius-5 ball
// window, radii uniform on [0,1].
ModelParams reference_params() {
    return ModelParams{2, 500.0 / ball_volume(2, 5.0), RadiusDistribution::uniform(0.0, 1.0)};
}

void criterion_1_and_2() {
    const ModelParams p = reference_params();
    const GrainMoments gm = grain_moments(p);
    const double w_vol = ball_volume(2, 5.0);
    const std::uint64_t seed = 0xF161;
    detail::FunctionalSelection vol_only;
    vol_only.volume = true;
    char buf[256];

    // Mean volume fraction over 200 replicates of 1e5 hit-or-miss samples.
    {
        Timer timer;
        auto recs = detail::run_replicates(p, 5.0, seed, 0, 200, 100000, 0, vol_only);
        std::vector<double> frac = detail::pluck(recs, "volume");
        for (double& v : frac) v /= w_vol;
        double m = mean_of(frac);
        double se = std::sqrt(var_of(frac, m) / double(frac.size()));
        double want = -std::expm1(-p.gamma * gm.v[2]);
        double elapsed = timer.seconds();
        bool ok = std::fabs(m - want) <= 3.0 * se && elapsed <= 120.0 * budget_scale();
        std::snprintf(buf, sizeof buf,
                      "mean volume fraction %.6f vs %.6f, |diff| = %.2e <= 3 se = %.2e (%.1f s)",
                      m, want, std::fabs(m - want), 3.0 * se, elapsed);
        report(ok, 1, buf);
    }

    // Mean surface content at the same configuration, and mean Euler
    // characteristic in a radius-3 window at half the intensity.
    {
        detail::FunctionalSelection surf_only;
        surf_only.surface = true;
        auto recs = detail::run_replicates(p, 5.0, seed, 0, 200, 0, 200, surf_only);
        std::vector<double> surf = detail::pluck(recs, "surface");
        double m = mean_of(surf);
        double se = std::sqrt(var_of(surf, m) / double(surf.size()));
        double want = mean_surface(w_vol, sphere_area(2, 5.0), gm, p.gamma);
        double z_surf = (m - want) / se;

        ModelParams ph = p;
        ph.gamma *= 0.5;
        detail::FunctionalSelection euler_only;
        euler_only.euler = true;
        auto erecs = detail::run_replicates(ph, 3.0, 0xF162, 0, 200, 0, 0, euler_only);
        std::vector<double> chi = detail::pluck(erecs, "euler");
        double mc = mean_of(chi);
        double sec = std::sqrt(var_of(chi, mc) / double(chi.size()));
        double wantc = mean_euler_2d(sphere_area(2, 3.0), ball_volume(2, 3.0),
                                     grain_moments(ph), ph.gamma);
        double z_chi = (mc - wantc) / sec;

        bool ok = std::fabs(z_surf) <= 3.0 && std::fabs(z_chi) <= 3.0;
        std::snprintf(buf, sizeof buf,
                      "mean surface z = %+.2f, mean Euler characteristic z = %+.2f",
                      z_surf, z_chi);
        report(ok, 2, buf);
    }
}

void criterion_3_4_5() {
    const ModelParams p{2, 0.5, RadiusDistribution::fixed(1.0)};
    const double R = 4.0;
    const std::uint64_t seed = 0xACCE55;
    char buf[320];

    Timer timer;
    detail::FunctionalSelection both;
    both.volume = both.surface = true;
    auto recs = detail::run_replicates(p, R, seed, 0, 2000, 20000, 300, both);
    std::vector<double> vol = detail::pluck(recs, "volume");
    std::vector<double> surf = detail::pluck(recs, "surface");
    const long n = long(vol.size());
    double sim_seconds = timer.seconds();

    // Exact window variance: the noise-corrected replicate variance brackets
    // the quadrature value inside a bootstrap 99% interval.
    {
        double noise = detail::mean_noise_var(recs, "volume");
        double want = var_volume_exact(p, R);
        Interval ci = bootstrap_variance_ci(vol, 0.99, 2000, seed ^ 0x626f6f74ULL);
        ci.lo -= noise;
        ci.hi -= noise;
        double mv = mean_of(vol);
        double corrected = var_of(vol, mv) - noise;
        double elapsed = timer.seconds();
        bool ok = ci.lo <= want && want <= ci.hi && elapsed <= 300.0 * budget_scale();
        std::snprintf(buf, sizeof buf,
                      "window variance %.3f, 99%% bootstrap [%.3f, %.3f] covers exact %.3f (%.1f s)",
                      corrected, ci.lo, ci.hi, want, elapsed);
        report(ok, 3, buf);
    }

    // Asymptotic variance: the per-volume ratios increase to the limit, the
    // final relative gap is below 1%, and dropping the horoball weight
    // strictly enlarges the integral.
    {
        Timer qtimer;
        double asym = var_volume_asymptotic(p);
        double prev = 0.0;
        bool monotone = true;
        double final_gap = 1e300;
        for (double Rq : {4.0, 6.0, 8.0, 10.0, 12.0}) {
            double ratio = var_volume_exact(p, Rq) / ball_volume(2, Rq);
            if (!(ratio > prev && ratio < asym)) monotone = false;
            final_gap = (asym - ratio) / asym;
            prev = ratio;
        }
        CovariogramTable tab = covariogram(p);
        double no_weight = std::exp(-2.0 * p.gamma * tab(0.0)) * unit_sphere_area(2)
                         * riemann(
                               [&](double s) {
                                   return std::expm1(p.gamma * tab(s)) * std::sinh(s);
                               },
                               0.0, tab.support(), 20000);
        double elapsed = qtimer.seconds();
        bool ok = monotone && final_gap <= 0.01 && asym < no_weight
               && elapsed <= 60.0 * budget_scale();
        std::snprintf(buf, sizeof buf,
                      "variance ratios rise to %.6f, final gap %.2e, unweighted integral %.6f (%.1f s)",
                      asym, final_gap, no_weight, elapsed);
        report(ok, 4, buf);
    }

    // Surface-volume covariance: the replicate covariance (unbiased under
    // independent estimator streams) against the local quadrature-plus-MC
    // value, whose MC error is driven below 10% of the value first.
    {
        double mv = mean_of(vol), ms = mean_of(surf);
        double cov_emp = 0.0;
        for (long i = 0; i < n; ++i)
            cov_emp += (surf[std::size_t(i)] - ms) * (vol[std::size_t(i)] - mv);
        cov_emp /= double(n - 1);
        double m22 = 0.0;
        for (long i = 0; i < n; ++i) {
            double t = (surf[std::size_t(i)] - ms) * (vol[std::size_t(i)] - mv) - cov_emp;
            m22 += t * t;
        }
        m22 /= double(n);
        double se_emp = std::sqrt(m22 / double(n));

        long n_mc = 200000;
        CovarianceEstimate want = cov_surf_vol_local(p, R, n_mc);
        while (want.std_error > 0.1 * std::fabs(want.value) && n_mc < 4000000) {
            n_mc *= 2;
            want = cov_surf_vol_local(p, R, n_mc);
        }
        double band = 3.0 * std::sqrt(se_emp * se_emp + want.std_error * want.std_error);
        bool ok = want.std_error <= 0.1 * std::fabs(want.value)
               && std::fabs(cov_emp - want.value) <= band;
        std::snprintf(buf, sizeof buf,
                      "surface-volume covariance %.3f vs %.3f +- %.3f, |diff| = %.3f <= %.3f (sim %.1f s)",
                      cov_emp, want.value, want.std_error, std::fabs(cov_emp - want.value),
                      band, sim_seconds);
        report(ok, 5, buf);
    }
}

void criterion_6() {
    const ModelParams p = reference_params();
    char buf[256];
    Timer timer;
    detail::FunctionalSelection vol_only;
    vol_only.volume = true;
    auto recs = detail::run_replicates(p, 6.0, 0xC170, 0, 1000, 100000, 0, vol_only);
    std::vector<double> vol = detail::pluck(recs, "volume");
    NormalityTest ad = anderson_darling_normal(vol);
    NormalityTest good = anderson_darling_normal(synthetic_normal(1000, 99, 3.0, 2.0));
    NormalityTest bad = anderson_darling_normal(synthetic_exponential(1000, 99));
    bool ok = ad.pass && good.pass && !bad.pass;
    std::snprintf(buf, sizeof buf,
                  "volume estimates normal (A2 = %.3f < %.3f); calibration normal %.3f, exponential %.3f (%.1f s)",
                  ad.statistic, anderson_darling_critical_1pct, good.statistic, bad.statistic,
                  timer.seconds());
    report(ok, 6, buf);
}

void criterion_7() {
    char buf[256];
    Timer timer;
    CoverReport rep = verify_covering(2, 1000000, 10000, 0x10CA1);
    long lo = 1L << 30, hi = 0;
    for (const auto& kv : rep.decade_max_overlap) {
        lo = std::min(lo, kv.second);
        hi = std::max(hi, kv.second);
    }
    double elapsed = timer.seconds();
    bool ok = rep.coverage_failures == 0 && rep.box_failures == 0 && lo == hi
           && rep.points_tested == 1000000 && rep.box_checks == 10000
           && elapsed <= 120.0 * budget_scale();
    std::snprintf(buf, sizeof buf,
                  "covering: 0 misses in %ld points, per-decade max overlap %ld..%ld, %ld box checks clean (%.1f s)",
                  rep.points_tested, lo, hi, rep.box_checks, elapsed);
    report(ok, 7, buf);
}

void criterion_8() {
    char buf[256];
    double worst_kin = 0.0;
    for (int d : {2, 3})
        for (int k : {d - 1, d})
            for (auto rr : {std::pair<double, double>{1.0, 1.0}, {0.5, 2.0}})
                worst_kin = std::max(worst_kin, kinematic_check(d, k, rr.first, rr.second).rel_error);
    for (auto rr : {std::pair<double, double>{1.0, 1.0}, {0.5, 2.0}})
        worst_kin = std::max(worst_kin, kinematic_check(2, 0, rr.first, rr.second).rel_error);

    double worst_steiner = 0.0;
    for (int d = 2; d <= 4; ++d)
        for (double a : {0.3, 1.0, 2.0})
            for (double r : {0.1, 0.7, 1.5}) {
                double lhs = ball_volume(d, a + r);
                double rhs = ball_volume(d, a);
                for (int j = 0; j < d; ++j)
                    rhs += steiner_coeff(d, j, r) * intrinsic_volume_ball(d, j, a);
                worst_steiner = std::max(worst_steiner,
                                         std::fabs(lhs - rhs) / std::max(1.0, lhs));
            }

    double worst_renorm = 0.0;
    for (int d = 2; d <= 6; ++d) {
        for (int k = 0; k < d; ++k) {
            double want = pi / d * unit_ball_volume(k) * unit_ball_volume(d - 1 - k)
                        / unit_ball_volume(d);
            worst_renorm = std::max(worst_renorm,
                                    std::fabs(renorm_const(d, k) - want) / std::fabs(want));
        }
        worst_renorm = std::max(worst_renorm, std::fabs(renorm_const(d, d) - 1.0));
    }

    double worst_limit = 0.0;
    for (int d = 2; d <= 4; ++d) {
        double vol = ball_volume(d, 10.0);
        worst_limit = std::max(worst_limit, std::fabs(sphere_area(d, 10.0) / vol - (d - 1)));
        for (int j = 0; j < d; ++j)
            worst_limit = std::max(worst_limit,
                                   std::fabs(intrinsic_volume_ball(d, j, 10.0) / vol - (d - 1)));
    }

    bool ok = worst_kin <= 1e-6 && worst_steiner <= 1e-8 && worst_renorm <= 1e-12
           && worst_limit <= 1e-3;
    std::snprintf(buf, sizeof buf,
                  "kinematic %.1e, Steiner %.1e, renormalization %.1e, large-ball ratios %.1e",
                  worst_kin, worst_steiner, worst_renorm, worst_limit);
    report(ok, 8, buf);
}

void criterion_9() {
    char buf[256];
    SplitMix64 rng = SplitMix64::stream(0x1DEA, 0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        int d = 2 + int(rng.next() % 4);
        double gamma = 0.05 + 0.9 * rng.uniform01();
        double R = 0.5 + 3.0 * rng.uniform01();
        RadiusDistribution rad = RadiusDistribution::fixed(0.1 + 1.4 * rng.uniform01());
        if (i % 2 == 1) {
            double a = 1.2 * rng.uniform01();
            rad = RadiusDistribution::uniform(a, a + 0.1 + rng.uniform01());
        }
        GrainMoments gm = grain_moments(ModelParams{d, gamma, rad});
        double lhs = mean_intrinsic_k0(d - 1, ball_window_table(d, R), gm, gamma)
                   / renorm_const(d, d - 1);
        double rhs = mean_surface(ball_volume(d, R), sphere_area(d, R), gm, gamma);
        worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)));
    }

    ModelParams p3{3, 0.1, RadiusDistribution::fixed(1.0)};
    GrainMoments gm3 = grain_moments(p3);
    std::vector<double> w3 = ball_window_table(3, 2.0);
    double worst_series = 0.0;
    for (int k = 0; k <= 2; ++k) {
        double lhs = mean_intrinsic_k0(k, w3, gm3, p3.gamma);
        double ref = series_oracle(k, w3, gm3, p3.gamma);
        worst_series = std::max(worst_series, std::fabs(lhs - ref) / std::fabs(ref));
    }

    bool ok = worst <= 1e-12 && worst_series <= 1e-6;
    std::snprintf(buf, sizeof buf,
                  "surface identity %.1e over 100 random models, series oracle %.1e",
                  worst, worst_series);
    report(ok, 9, buf);
}

void criterion_10() {
    char buf[320];
    const long n = 1000000;
    double worst_z = 0.0, worst_ball = 0.0;
    for (auto cs : {std::pair<int, double>{2, 0.8}, {3, 1.5}, {2, 2.6}}) {
        int d = cs.first;
        double s = cs.second;
        Point z = base_point(d);
        z[0] = std::cosh(s);
        z[1] = std::sinh(s);
        SplitMix64 rng = SplitMix64::stream(0x40B0, std::uint64_t(d) << 8 | std::uint64_t(s * 10));
        long hits = 0;
        for (long i = 0; i < n; ++i) {
            Horoball hb;
            hb.u = uniform_direction(d, rng);
            hb.t = std::log(std::max(rng.uniform01(), 1e-300)) / (d - 1);
            if (horoball_contains(hb, z)) ++hits;
        }
        double phat = double(hits) / double(n);
        double se = std::sqrt(std::max(phat * (1.0 - phat), 1e-12) / double(n));
        double want = horoball_hit_prob(d, s);
        worst_z = std::max(worst_z, std::fabs(phat - want) / se);
        worst_ball = std::max(worst_ball,
                              std::fabs(lens_volume(d, 15.0, 15.0, s) / ball_volume(d, 15.0) - want));
    }

    double worst_pair = 0.0;
    for (int d : {2, 3}) {
        SplitMix64 rng = SplitMix64::stream(0x40B1, std::uint64_t(d));
        for (int rep = 0; rep < 2; ++rep) {
            Point y = sample_uniform_ball_at_base(d, 1.5, rng);
            Point z = sample_uniform_ball_at_base(d, 1.5, rng);
            double w = horoball_pair_weight(y, z);
            double scale = std::max(1.0, std::fabs(w));
            worst_pair = std::max(worst_pair,
                                  std::fabs(horoball_pair_weight(z, y) - w) / scale);
            Isometry iso = compose(translation_to(sample_uniform_ball_at_base(d, 1.5, rng)),
                                   random_rotation(d, rng));
            worst_pair = std::max(worst_pair,
                                  std::fabs(horoball_pair_weight(apply(iso, y), apply(iso, z)) - w)
                                      / scale);
        }
    }

    bool ok = worst_z <= 3.0 && worst_ball <= 1e-3 && worst_pair <= 1e-6;
    std::snprintf(buf, sizeof buf,
                  "hit probability |z| <= %.2f over 1e6 draws, ball-limit gap %.1e, pair weight symmetry/invariance %.1e",
                  worst_z, worst_ball, worst_pair);
    report(ok, 10, buf);
}

}  // namespace

int main() {
    std::printf("acceptance battery, %d thread(s), budgets scaled x%.1f\n",
                thread_count(), budget_scale());
    criterion_1_and_2();
    criterion_3_4_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0)
        std::printf("all 10 criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
