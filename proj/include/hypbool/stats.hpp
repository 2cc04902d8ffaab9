#pragma once

// Statistics kit for the replication harness: moments, Anderson-Darling
// normality against the normal family with estimated parameters, percentile
// bootstrap for the sample variance, and Fisher's z transform for comparing
// correlations.

#include "hypbool/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hypbool {

inline double sample_mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("sample_mean: empty input");
    double m = 0.0;
    for (double v : x) m += v;
    return m / double(x.size());
}

inline double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) throw std::invalid_argument("sample_variance: n >= 2 required");
    double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / double(x.size() - 1);
}

inline double sample_covariance(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("sample_covariance: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("sample_covariance: n >= 2 required");
    double mx = sample_mean(x), my = sample_mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / double(x.size() - 1);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Upper tail computed directly so that both tails keep full precision.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct NormalityTest {
    double statistic = 0.0;  // size-adjusted Anderson-Darling A^2
    bool pass = false;
};

// One percent critical value for the normal family with estimated mean and
// variance, applied to the size-adjusted statistic.
inline constexpr double anderson_darling_critical_1pct = 1.035;

inline NormalityTest anderson_darling_normal(std::vector<double> x) {
    const long n = long(x.size());
    if (n < 100) throw std::invalid_argument("anderson_darling_normal: n >= 100 required");
    double mean = sample_mean(x);
    double var = sample_variance(x);
    if (!(var > 0.0)) throw std::invalid_argument("anderson_darling_normal: degenerate sample");
    const double sd = std::sqrt(var);
    std::sort(x.begin(), x.end());
    double a2 = -double(n);
    for (long i = 0; i < n; ++i) {
        double zl = (x[i] - mean) / sd;
        double zh = (x[n - 1 - i] - mean) / sd;
        double log_cdf = std::log(std::max(normal_cdf(zl), 1e-300));
        double log_sf = std::log(std::max(normal_sf(zh), 1e-300));
        a2 -= double(2 * i + 1) / double(n) * (log_cdf + log_sf);
    }
    double adjusted = a2 * (1.0 + 0.75 / double(n) + 2.25 / (double(n) * double(n)));
    return {adjusted, adjusted < anderson_darling_critical_1pct};
}

// Linear interpolation between order statistics; sorted input.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty input");
    p = std::clamp(p, 0.0, 1.0);
    double pos = p * double(sorted.size() - 1);
    std::size_t lo = std::size_t(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap for the sample variance; each resample draws its own
// seeded stream, so the interval is reproducible.
inline Interval bootstrap_variance_ci(const std::vector<double>& x, double level,
                                      int n_resamples, std::uint64_t seed) {
    if (x.size() < 2) throw std::invalid_argument("bootstrap_variance_ci: n >= 2 required");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_variance_ci: level in (0,1) required");
    if (n_resamples < 10)
        throw std::invalid_argument("bootstrap_variance_ci: n_resamples >= 10 required");
    const std::size_t n = x.size();
    std::vector<double> vars(static_cast<std::size_t>(n_resamples));
    for (int r = 0; r < n_resamples; ++r) {
        SplitMix64 rng = SplitMix64::stream(seed, std::uint64_t(r));
        double m = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t idx = std::min(n - 1, std::size_t(rng.uniform01() * double(n)));
            double v = x[idx];
            double delta = v - m;
            m += delta / double(i + 1);
            s2 += delta * (v - m);
        }
        vars[std::size_t(r)] = s2 / double(n - 1);
    }
    std::sort(vars.begin(), vars.end());
    double alpha = 0.5 * (1.0 - level);
    return {quantile_sorted(vars, alpha), quantile_sorted(vars, 1.0 - alpha)};
}

inline double fisher_z(double r) {
    if (!(r > -1.0 && r < 1.0)) throw std::invalid_argument("fisher_z: |r| < 1 required");
    return std::atanh(r);
}

inline double fisher_z_se(long n) {
    if (n < 4) throw std::invalid_argument("fisher_z_se: n >= 4 required");
    return 1.0 / std::sqrt(double(n - 3));
}

}  // namespace hypbool
