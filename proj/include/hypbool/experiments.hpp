#pragma once

// Replicate harness: simulate the model repeatedly, estimate the requested
// functionals on each replicate, and compare the empirical moments against
// the closed-form and quadrature values.  Replicates are drawn from disjoint
// seed streams and run in parallel into per-index slots; all reductions are
// sequential afterwards, so a report depends only on the config.

#include "hypbool/config.hpp"
#include "hypbool/functionals.hpp"
#include "hypbool/nerve.hpp"
#include "hypbool/parallel.hpp"
#include "hypbool/process.hpp"
#include "hypbool/stats.hpp"
#include "hypbool/theory.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypbool {

struct ReplicateRecord {
    std::uint64_t seed = 0;  // replicate stream id under the master seed
    double R = 0.0;
    std::map<std::string, FunctionalEstimate> values;
};

struct FunctionalSummary {
    std::string name;
    double empirical_mean = 0.0;
    double empirical_var = 0.0;
    double estimator_noise_var = 0.0;  // mean squared per-replicate standard error
    double corrected_var = 0.0;        // empirical_var - estimator_noise_var
    double theory_mean = 0.0;
    double mean_z = 0.0;
    bool has_theory_var = false;
    double theory_var = 0.0;
    double var_z = 0.0;
    Interval var_ci;  // bootstrap interval around corrected_var
    bool var_pass = true;
    bool normality_tested = false;
    double normality_stat = 0.0;
    bool normality_pass = true;
};

struct SummaryReport {
    std::string config_echo;
    long replicates = 0;
    long mc_samples = 0;       // after pilot tuning
    long surface_samples = 0;  // after pilot tuning
    double runtime_seconds = 0.0;
    std::vector<FunctionalSummary> functionals;
    std::vector<std::string> notes;
};

// Normality of a standardized sample of functional values.
inline NormalityTest clt_test(const std::vector<double>& values) {
    return anderson_darling_normal(values);
}

namespace detail {

struct FunctionalSelection {
    bool volume = false;
    bool surface = false;
    bool euler = false;
};

inline FunctionalSelection parse_functionals(const Config& c) {
    FunctionalSelection sel;
    std::istringstream in(c.functionals);
    std::string name;
    while (std::getline(in, name, ',')) {
        name = trim(name);
        if (name == "volume") sel.volume = true;
        else if (name == "surface") sel.surface = true;
        else if (name == "euler") sel.euler = true;
    }
    return sel;
}

// One replicate: the simulation and each estimator own disjoint streams, so
// any subset of functionals reproduces the same values.
inline ReplicateRecord run_replicate(const ModelParams& params, double R,
                                     std::uint64_t master_seed, std::uint64_t rep_id,
                                     long n_vol, long n_surf, const FunctionalSelection& sel) {
    ReplicateRecord rec;
    rec.seed = rep_id;
    rec.R = R;
    SplitMix64 sim = SplitMix64::stream(master_seed, 4 * rep_id);
    Realization real = sample_realization(sim, params, R);
    if (sel.volume) {
        SplitMix64 rng = SplitMix64::stream(master_seed, 4 * rep_id + 1);
        rec.values["volume"] = estimate_volume(real, n_vol, rng);
    }
    if (sel.surface) {
        SplitMix64 rng = SplitMix64::stream(master_seed, 4 * rep_id + 2);
        rec.values["surface"] = estimate_surface(real, n_surf, rng);
    }
    if (sel.euler) {
        FunctionalEstimate est;
        est.value = double(euler_char_2d(real));
        est.std_error = 0.0;
        est.n_samples = long(real.grains.size());
        rec.values["euler"] = est;
    }
    return rec;
}

inline std::vector<ReplicateRecord> run_replicates(const ModelParams& params, double R,
                                                   std::uint64_t master_seed,
                                                   std::uint64_t id_offset, long n_rep,
                                                   long n_vol, long n_surf,
                                                   const FunctionalSelection& sel) {
    std::vector<ReplicateRecord> recs(static_cast<std::size_t>(n_rep));
    parallel_for(n_rep, [&](long r) {
        recs[std::size_t(r)] = run_replicate(params, R, master_seed,
                                             id_offset + std::uint64_t(r), n_vol, n_surf, sel);
    });
    return recs;
}

inline std::vector<double> pluck(const std::vector<ReplicateRecord>& recs,
                                 const std::string& name) {
    std::vector<double> out;
    out.reserve(recs.size());
    for (const auto& rec : recs) out.push_back(rec.values.at(name).value);
    return out;
}

inline double mean_noise_var(const std::vector<ReplicateRecord>& recs, const std::string& name) {
    std::vector<double> se2;
    se2.reserve(recs.size());
    for (const auto& rec : recs) {
        double se = rec.values.at(name).std_error;
        se2.push_back(se * se);
    }
    return pairwise_sum(se2, 0, se2.size()) / double(se2.size());
}

inline std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Grow a sample count until the estimator noise is at most a tenth of the
// spread between replicates, within a 64x budget.
inline long tune_samples(long n0, double noise_sd, double between_sd, const char* what,
                         std::vector<std::string>& notes) {
    if (!(between_sd > 0.0) || noise_sd <= 0.1 * between_sd) return n0;
    double factor = (noise_sd / (0.1 * between_sd)) * (noise_sd / (0.1 * between_sd));
    factor = std::min(factor, 64.0);
    long n = n0 * long(std::ceil(factor));
    notes.push_back(std::string("pilot: ") + what + " noise sd " + format_g(noise_sd)
                    + " vs replicate sd " + format_g(between_sd) + "; samples "
                    + std::to_string(n0) + " -> " + std::to_string(n));
    return n;
}

// Mean z-score with a degenerate-sample guard that keeps the score finite.
inline double safe_mean_z(double diff, double var, long n, std::vector<std::string>& notes,
                          const std::string& name) {
    double se = std::sqrt(std::max(var, 0.0) / double(n));
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    notes.push_back("functional " + name + ": zero empirical variance with nonzero bias");
    return diff > 0.0 ? 1e18 : -1e18;
}

}  // namespace detail

inline SummaryReport run_experiment(const Config& config,
                                    std::vector<ReplicateRecord>* records_out = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    check_config(config);
    ModelParams params = resolved_params(config);
    detail::FunctionalSelection sel = detail::parse_functionals(config);

    SummaryReport report;
    report.config_echo = echo_config(config);
    report.replicates = config.replicates;
    report.mc_samples = config.mc_samples;
    report.surface_samples = config.surface_samples;

    // Pilot tuning keeps estimator noise a small fraction of the replicate
    // spread, so z-scores measure the model and not the estimators.
    const long n_pilot = std::min<long>(20, config.replicates);
    if (params.gamma > 0.0 && n_pilot >= 2) {
        std::vector<ReplicateRecord> pilot = detail::run_replicates(
            params, config.window_R, config.master_seed, std::uint64_t(1) << 32, n_pilot,
            config.mc_samples, config.surface_samples, sel);
        if (sel.volume) {
            double between = std::sqrt(sample_variance(detail::pluck(pilot, "volume")));
            double noise = std::sqrt(detail::mean_noise_var(pilot, "volume"));
            report.mc_samples = detail::tune_samples(config.mc_samples, noise, between,
                                                     "volume", report.notes);
        }
        if (sel.surface) {
            double between = std::sqrt(sample_variance(detail::pluck(pilot, "surface")));
            double noise = std::sqrt(detail::mean_noise_var(pilot, "surface"));
            report.surface_samples = detail::tune_samples(config.surface_samples, noise, between,
                                                          "surface", report.notes);
        }
    } else if (params.gamma == 0.0) {
        report.notes.push_back("zero intensity: pilot tuning skipped");
    }

    std::vector<ReplicateRecord> recs = detail::run_replicates(
        params, config.window_R, config.master_seed, 0, config.replicates,
        report.mc_samples, report.surface_samples, sel);

    GrainMoments gm = grain_moments(params);
    const double wv = ball_volume(config.d, config.window_R);
    const double ws = sphere_area(config.d, config.window_R);
    const long n = config.replicates;

    std::vector<std::pair<std::string, bool>> plan;
    if (sel.volume) plan.emplace_back("volume", true);
    if (sel.surface) plan.emplace_back("surface", false);
    if (sel.euler) plan.emplace_back("euler", false);

    for (const auto& [name, has_var] : plan) {
        FunctionalSummary fs;
        fs.name = name;
        std::vector<double> vals = detail::pluck(recs, name);
        fs.empirical_mean = sample_mean(vals);
        fs.empirical_var = n >= 2 ? sample_variance(vals) : 0.0;
        fs.estimator_noise_var = detail::mean_noise_var(recs, name);
        fs.corrected_var = fs.empirical_var - fs.estimator_noise_var;

        if (name == "volume") fs.theory_mean = mean_volume(wv, gm, params.gamma);
        else if (name == "surface") fs.theory_mean = mean_surface(wv, ws, gm, params.gamma);
        else fs.theory_mean = mean_euler_2d(ws, wv, gm, params.gamma);

        fs.mean_z = detail::safe_mean_z(fs.empirical_mean - fs.theory_mean, fs.empirical_var, n,
                                        report.notes, name);

        fs.has_theory_var = has_var;
        if (has_var) {
            fs.theory_var = var_volume_exact(params, config.window_R);
            if (n >= 2 && fs.empirical_var > 0.0) {
                Interval raw = bootstrap_variance_ci(vals, 0.99, 1000,
                                                     config.master_seed ^ 0x626f6f74ULL);
                fs.var_ci = {raw.lo - fs.estimator_noise_var, raw.hi - fs.estimator_noise_var};
                double m4 = 0.0, m = fs.empirical_mean;
                for (double v : vals) {
                    double dv = (v - m) * (v - m) - fs.empirical_var;
                    m4 += dv * dv;
                }
                m4 /= double(n);
                double se_var = std::sqrt(m4 / double(n));
                fs.var_z = se_var > 0.0 ? (fs.corrected_var - fs.theory_var) / se_var : 0.0;
            } else {
                fs.var_ci = {fs.corrected_var, fs.corrected_var};
                fs.var_z = fs.corrected_var == fs.theory_var ? 0.0 : 1e18;
            }
            fs.var_pass = fs.var_ci.lo <= fs.theory_var && fs.theory_var <= fs.var_ci.hi;
        }

        if (n >= 100 && fs.empirical_var > 0.0) {
            NormalityTest ad = anderson_darling_normal(vals);
            fs.normality_tested = true;
            fs.normality_stat = ad.statistic;
            fs.normality_pass = ad.pass;
        } else {
            report.notes.push_back("functional " + name
                                   + ": normality not tested (needs 100 replicates and spread)");
        }
        report.functionals.push_back(fs);
    }

    if (records_out) *records_out = std::move(recs);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// The replicate records alone, without pilot tuning or theory comparisons;
// matches the main run of run_experiment when tuning leaves the sample
// counts unchanged.
inline std::vector<ReplicateRecord> simulate_replicates(const Config& config) {
    check_config(config);
    ModelParams params = resolved_params(config);
    detail::FunctionalSelection sel = detail::parse_functionals(config);
    return detail::run_replicates(params, config.window_R, config.master_seed, 0,
                                  config.replicates, config.mc_samples, config.surface_samples,
                                  sel);
}

struct VarianceScanRow {
    double R = 0.0;
    double ratio = 0.0;         // noise-corrected Var(volume estimate) / Vol(window)
    Interval ratio_ci;          // bootstrap interval on the ratio
    double theory_ratio = 0.0;  // quadrature variance / Vol(window)
    bool in_range = true;
};

struct VarianceScan {
    double asymptotic = 0.0;
    double c_lo = 0.0;  // accepted band around the asymptotic value
    double c_hi = 0.0;
    std::vector<VarianceScanRow> rows;
    bool all_in_range = true;
};

// Variance-to-volume ratios over growing windows, against the band around
// the asymptotic density.
inline VarianceScan variance_scan(const Config& config, const std::vector<double>& R_grid) {
    check_config(config);
    if (R_grid.empty()) throw std::invalid_argument("variance_scan: empty grid");
    for (std::size_t i = 0; i + 1 < R_grid.size(); ++i)
        if (!(R_grid[i] < R_grid[i + 1]))
            throw std::invalid_argument("variance_scan: R_grid must be increasing");
    ModelParams params = resolved_params(config);
    if (!(params.gamma > 0.0))
        throw std::invalid_argument("variance_scan: positive intensity required");

    detail::FunctionalSelection sel;
    sel.volume = true;

    VarianceScan scan;
    scan.asymptotic = var_volume_asymptotic(params);
    scan.c_lo = 0.5 * scan.asymptotic;
    scan.c_hi = 1.5 * scan.asymptotic;
    for (std::size_t ri = 0; ri < R_grid.size(); ++ri) {
        double R = R_grid[ri];
        std::vector<ReplicateRecord> recs = detail::run_replicates(
            params, R, config.master_seed, std::uint64_t(ri + 2) << 32, config.replicates,
            config.mc_samples, config.surface_samples, sel);
        std::vector<double> vals = detail::pluck(recs, "volume");
        double vol = ball_volume(config.d, R);
        double noise = detail::mean_noise_var(recs, "volume");
        VarianceScanRow row;
        row.R = R;
        row.ratio = (sample_variance(vals) - noise) / vol;
        Interval raw = bootstrap_variance_ci(vals, 0.99, 1000,
                                             config.master_seed ^ (0x7363616eULL + ri));
        row.ratio_ci = {(raw.lo - noise) / vol, (raw.hi - noise) / vol};
        row.theory_ratio = var_volume_exact(params, R) / vol;
        row.in_range = row.ratio >= scan.c_lo && row.ratio <= scan.c_hi;
        scan.all_in_range = scan.all_in_range && row.in_range;
        scan.rows.push_back(row);
    }
    return scan;
}

struct MultivariateReport {
    bool skipped = false;
    std::string note;
    long n = 0;
    double corr_empirical = 0.0;
    double corr_theory = 0.0;
    double corr_se = 0.0;  // on the Fisher z scale, estimator and theory noise combined
    double corr_z = 0.0;
    double theory_cov = 0.0;
    double theory_cov_se = 0.0;
    NormalityTest volume_normality;
    NormalityTest surface_normality;
    bool pass = false;
};

// Joint behavior of the volume and boundary estimates: marginal normality
// plus the empirical correlation against the quadrature/MC covariance.  The
// boundary variance has no closed form here, so the correlation denominator
// uses its noise-corrected empirical variance.
inline MultivariateReport multivariate_check(const Config& config) {
    check_config(config);
    ModelParams params = resolved_params(config);
    MultivariateReport rep;
    if (params.gamma == 0.0) {
        rep.skipped = true;
        rep.note = "zero intensity: joint limit is degenerate, check skipped";
        rep.pass = true;
        return rep;
    }
    if (config.replicates < 500)
        throw std::invalid_argument("multivariate_check: at least 500 replicates required");

    detail::FunctionalSelection sel;
    sel.volume = true;
    sel.surface = true;
    std::vector<ReplicateRecord> recs = detail::run_replicates(
        params, config.window_R, config.master_seed, std::uint64_t(1) << 40, config.replicates,
        config.mc_samples, config.surface_samples, sel);
    std::vector<double> vol = detail::pluck(recs, "volume");
    std::vector<double> surf = detail::pluck(recs, "surface");
    rep.n = config.replicates;

    double var_v = sample_variance(vol);
    double var_s = sample_variance(surf);
    rep.corr_empirical = sample_covariance(vol, surf) / std::sqrt(var_v * var_s);

    CovarianceEstimate cov = cov_surf_vol_local(params, config.window_R,
                                                std::max<long>(100000, config.mc_samples));
    rep.theory_cov = cov.value;
    rep.theory_cov_se = cov.std_error;
    double th_var_v = var_volume_exact(params, config.window_R);
    double corr_var_s = var_s - detail::mean_noise_var(recs, "surface");
    if (!(corr_var_s > 0.0)) corr_var_s = var_s;
    double corr_var_v = var_v - detail::mean_noise_var(recs, "volume");
    double denom = std::sqrt(th_var_v * corr_var_s);
    rep.corr_theory = cov.value / denom;

    // The empirical correlation is diluted by estimator noise; compare on the
    // same footing by scaling the theory ratio down to the noisy marginals.
    double dilution = std::sqrt((corr_var_v / var_v) * (corr_var_s / var_s));
    double target = std::clamp(rep.corr_theory * dilution, -0.999999, 0.999999);
    double se_theory = cov.std_error / (denom * (1.0 - target * target));
    rep.corr_se = std::sqrt(fisher_z_se(rep.n) * fisher_z_se(rep.n) + se_theory * se_theory);
    rep.corr_z = (fisher_z(std::clamp(rep.corr_empirical, -0.999999, 0.999999))
                  - fisher_z(target)) / rep.corr_se;

    rep.volume_normality = anderson_darling_normal(vol);
    rep.surface_normality = anderson_darling_normal(surf);
    rep.pass = std::fabs(rep.corr_z) <= 3.0 && rep.volume_normality.pass
            && rep.surface_normality.pass;
    return rep;
}

inline void write_replicates_csv(std::ostream& out, const std::vector<ReplicateRecord>& recs) {
    out << "seed,R,functional,value,se\n";
    char buf[160];
    for (const auto& rec : recs) {
        for (const auto& [name, est] : rec.values) {
            std::snprintf(buf, sizeof buf, "%llu,%.17g,%s,%.17g,%.17g\n",
                          static_cast<unsigned long long>(rec.seed), rec.R, name.c_str(),
                          est.value, est.std_error);
            out << buf;
        }
    }
}

inline nlohmann::json to_json(const FunctionalSummary& fs) {
    nlohmann::json j;
    j["name"] = fs.name;
    j["empirical_mean"] = fs.empirical_mean;
    j["empirical_var"] = fs.empirical_var;
    j["estimator_noise_var"] = fs.estimator_noise_var;
    j["corrected_var"] = fs.corrected_var;
    j["theory_mean"] = fs.theory_mean;
    j["mean_z"] = fs.mean_z;
    if (fs.has_theory_var) {
        j["theory_var"] = fs.theory_var;
        j["var_z"] = fs.var_z;
        j["var_ci"] = {fs.var_ci.lo, fs.var_ci.hi};
        j["var_pass"] = fs.var_pass;
    }
    j["normality_tested"] = fs.normality_tested;
    if (fs.normality_tested) {
        j["normality_stat"] = fs.normality_stat;
        j["normality_pass"] = fs.normality_pass;
    }
    return j;
}

inline nlohmann::json to_json(const SummaryReport& report) {
    nlohmann::json j;
    j["config"] = report.config_echo;
    j["replicates"] = report.replicates;
    j["mc_samples"] = report.mc_samples;
    j["surface_samples"] = report.surface_samples;
    j["runtime_seconds"] = report.runtime_seconds;
    j["notes"] = report.notes;
    j["functionals"] = nlohmann::json::array();
    for (const auto& fs : report.functionals) j["functionals"].push_back(to_json(fs));
    return j;
}

inline nlohmann::json to_json(const VarianceScan& scan) {
    nlohmann::json j;
    j["asymptotic"] = scan.asymptotic;
    j["band"] = {scan.c_lo, scan.c_hi};
    j["all_in_range"] = scan.all_in_range;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : scan.rows) {
        nlohmann::json r;
        r["R"] = row.R;
        r["ratio"] = row.ratio;
        r["ratio_ci"] = {row.ratio_ci.lo, row.ratio_ci.hi};
        r["theory_ratio"] = row.theory_ratio;
        r["in_range"] = row.in_range;
        j["rows"].push_back(r);
    }
    return j;
}

inline nlohmann::json to_json(const MultivariateReport& rep) {
    nlohmann::json j;
    j["skipped"] = rep.skipped;
    if (!rep.note.empty()) j["note"] = rep.note;
    j["pass"] = rep.pass;
    if (rep.skipped) return j;
    j["n"] = rep.n;
    j["corr_empirical"] = rep.corr_empirical;
    j["corr_theory"] = rep.corr_theory;
    j["corr_se"] = rep.corr_se;
    j["corr_z"] = rep.corr_z;
    j["theory_cov"] = rep.theory_cov;
    j["theory_cov_se"] = rep.theory_cov_se;
    j["volume_normality"] = {{"stat", rep.volume_normality.statistic},
                             {"pass", rep.volume_normality.pass}};
    j["surface_normality"] = {{"stat", rep.surface_normality.statistic},
                              {"pass", rep.surface_normality.pass}};
    return j;
}

}  // namespace hypbool
