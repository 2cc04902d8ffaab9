// Config round-trips, the statistics kit against known distributions, and
// the replicate harness against the moment formulas it is meant to check.

#include <catch2/catch_amalgamated.hpp>

#include "hypbool/config.hpp"
#include "hypbool/experiments.hpp"
#include "hypbool/geometry.hpp"
#include "hypbool/rng.hpp"
#include "hypbool/stats.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hypbool;

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

}  // namespace

TEST_CASE("config parsing and echo", "[experiments]") {
    SECTION("round trip through the echo") {
        std::string text =
            "# reference configuration\n"
            "d = 2\n"
            "grains_per_window = 500   # expected centers in the window\n"
            "radius = uniform 0 1\n"
            "window_R = 5\n"
            "replicates = 200\n"
            "master_seed = 42\n"
            "mc_samples = 100000\n"
            "functionals = volume,surface\n";
        Config a = parse_config_text(text);
        REQUIRE(a.d == 2);
        REQUIRE(a.grains_per_window == 500.0);
        REQUIRE(a.radius_kind == "uniform");
        REQUIRE(a.radius_a == 0.0);
        REQUIRE(a.radius_b == 1.0);
        REQUIRE(a.master_seed == 42);
        Config b = parse_config_text(echo_config(a));
        REQUIRE(a == b);

        a.gamma = 0.1234567890123456789;
        a.radius_kind = "fixed";
        a.radius_r = 1.0 / 3.0;
        a.out_json = "report.json";
        Config c = parse_config_text(echo_config(a));
        REQUIRE(a == c);
    }

    SECTION("errors carry the valid keys and kinds") {
        try {
            parse_config_text("dd = 3\n");
            REQUIRE(false);
        } catch (const std::invalid_argument& e) {
            REQUIRE(std::string(e.what()).find("unknown key") != std::string::npos);
            REQUIRE(std::string(e.what()).find("master_seed") != std::string::npos);
        }
        REQUIRE_THROWS_AS(parse_config_text("radius = gaussian 1\n"), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_config_text("radius = uniform 1 0.5\n"), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_config_text("d = 3\nfunctionals = euler\ngamma = 1\n"),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(parse_config_text("just some words\n"), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_config_text("replicates = 0\ngamma = 1\n"), std::invalid_argument);
        REQUIRE_THROWS_AS(load_config("/nonexistent/path.cfg"), std::runtime_error);
    }

    SECTION("intensity resolution") {
        Config c;
        c.d = 2;
        c.grains_per_window = 500.0;
        c.window_R = 5.0;
        c.radius_kind = "uniform";
        c.radius_a = 0.0;
        c.radius_b = 1.0;
        ModelParams p = resolved_params(c);
        REQUIRE(std::fabs(p.gamma - 500.0 / (2.0 * pi * (std::cosh(5.0) - 1.0))) < 1e-12);

        c.gamma = 0.25;
        REQUIRE(resolved_params(c).gamma == 0.25);
    }
}

TEST_CASE("statistics kit", "[experiments]") {
    SECTION("moments on a known sample") {
        std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
        std::vector<double> y = {2.0, 4.0, 6.0, 8.0};
        REQUIRE(sample_mean(x) == 2.5);
        REQUIRE(std::fabs(sample_variance(x) - 5.0 / 3.0) < 1e-15);
        REQUIRE(std::fabs(sample_covariance(x, y) - 10.0 / 3.0) < 1e-15);
        REQUIRE_THROWS(sample_variance(std::vector<double>{1.0}));
    }

    SECTION("normal distribution helpers") {
        REQUIRE(normal_cdf(0.0) == 0.5);
        REQUIRE(std::fabs(normal_cdf(1.0) - 0.8413447460685429) < 1e-12);
        REQUIRE(std::fabs(normal_cdf(2.0) + normal_cdf(-2.0) - 1.0) < 1e-15);
        REQUIRE(std::fabs(normal_sf(3.0) - normal_cdf(-3.0)) < 1e-18);
    }

    SECTION("quantile interpolation") {
        std::vector<double> s = {1.0, 2.0, 3.0, 5.0};
        REQUIRE(quantile_sorted(s, 0.0) == 1.0);
        REQUIRE(quantile_sorted(s, 1.0) == 5.0);
        REQUIRE(std::fabs(quantile_sorted(s, 0.5) - 2.5) < 1e-15);
    }

    SECTION("normality test calibration") {
        int pass = 0;
        for (int b = 0; b < 100; ++b) {
            NormalityTest t = anderson_darling_normal(synthetic_normal(200, 1000 + b, 3.0, 2.0));
            if (t.pass) ++pass;
        }
        REQUIRE(pass >= 95);

        NormalityTest expo = anderson_darling_normal(synthetic_exponential(1000, 7));
        REQUIRE_FALSE(expo.pass);
        REQUIRE(expo.statistic > anderson_darling_critical_1pct);
    }

    SECTION("normality statistic is location and scale invariant") {
        std::vector<double> x = synthetic_normal(300, 11, 0.0, 1.0);
        std::vector<double> y = x;
        for (auto& v : y) v = 100.0 + 7.5 * v;
        double sx = anderson_darling_normal(x).statistic;
        double sy = anderson_darling_normal(y).statistic;
        REQUIRE(std::fabs(sx - sy) < 1e-10);
    }

    SECTION("normality test guards") {
        REQUIRE_THROWS(anderson_darling_normal(synthetic_normal(99, 1, 0.0, 1.0)));
        REQUIRE_THROWS(anderson_darling_normal(std::vector<double>(200, 1.0)));
    }

    SECTION("bootstrap variance interval") {
        std::vector<double> x = synthetic_normal(500, 21, 0.0, 2.0);
        Interval ci = bootstrap_variance_ci(x, 0.99, 1000, 99);
        REQUIRE(ci.lo < ci.hi);
        REQUIRE(ci.lo < 4.0);
        REQUIRE(ci.hi > 4.0);
        Interval again = bootstrap_variance_ci(x, 0.99, 1000, 99);
        REQUIRE(ci.lo == again.lo);
        REQUIRE(ci.hi == again.hi);
        REQUIRE_THROWS(bootstrap_variance_ci(x, 1.5, 1000, 99));
    }

    SECTION("fisher transform") {
        REQUIRE(fisher_z(0.0) == 0.0);
        REQUIRE(std::fabs(fisher_z(0.5) - 0.5 * std::log(3.0)) < 1e-15);
        REQUIRE(std::fabs(fisher_z_se(103) - 0.1) < 1e-15);
        REQUIRE_THROWS(fisher_z(1.0));
        REQUIRE_THROWS(fisher_z_se(3));
    }

    SECTION("clt test wrapper") {
        REQUIRE(clt_test(synthetic_normal(500, 31, -2.0, 0.5)).pass);
        REQUIRE_FALSE(clt_test(synthetic_exponential(1000, 31)).pass);
    }
}

TEST_CASE("zero intensity experiment", "[experiments]") {
    Config c;
    c.d = 2;
    c.gamma = 0.0;
    c.grains_per_window = 0.0;
    c.radius_kind = "fixed";
    c.radius_r = 1.0;
    c.window_R = 2.0;
    c.replicates = 60;
    c.mc_samples = 500;
    c.surface_samples = 20;
    c.functionals = "volume,surface,euler";

    std::vector<ReplicateRecord> recs;
    SummaryReport rep = run_experiment(c, &recs);
    REQUIRE(rep.functionals.size() == 3);
    for (const auto& fs : rep.functionals) {
        REQUIRE(fs.empirical_mean == 0.0);
        REQUIRE(fs.empirical_var == 0.0);
        REQUIRE(fs.theory_mean == 0.0);
        REQUIRE(fs.mean_z == 0.0);
        REQUIRE(fs.var_pass);
    }
    REQUIRE(long(recs.size()) == c.replicates);
    for (const auto& r : recs) {
        REQUIRE(r.values.size() == 3);
        for (const auto& [name, est] : r.values) REQUIRE(est.value == 0.0);
    }

    std::ostringstream csv;
    write_replicates_csv(csv, recs);
    std::istringstream lines(csv.str());
    std::string line;
    long count = 0;
    while (std::getline(lines, line)) ++count;
    REQUIRE(count == 1 + 3 * c.replicates);
}

TEST_CASE("experiment reproducibility", "[experiments]") {
    Config c;
    c.d = 2;
    c.gamma = 0.3;
    c.radius_kind = "fixed";
    c.radius_r = 0.6;
    c.window_R = 2.0;
    c.replicates = 30;
    c.mc_samples = 2000;
    c.surface_samples = 50;
    c.master_seed = 77;

    SummaryReport a = run_experiment(c);
    SummaryReport b = run_experiment(c);
    nlohmann::json ja = to_json(a), jb = to_json(b);
    ja.erase("runtime_seconds");
    jb.erase("runtime_seconds");
    REQUIRE(ja.dump() == jb.dump());
    REQUIRE(parse_config_text(a.config_echo) == c);
}

TEST_CASE("experiment agrees with the moment formulas", "[experiments]") {
    Config c;
    c.d = 2;
    c.gamma = 0.5;
    c.radius_kind = "fixed";
    c.radius_r = 1.0;
    c.window_R = 3.0;
    c.replicates = 150;
    c.mc_samples = 20000;
    c.surface_samples = 200;
    c.master_seed = 2024;

    SummaryReport rep = run_experiment(c);
    REQUIRE(rep.functionals.size() == 2);
    for (const auto& fs : rep.functionals) {
        REQUIRE(std::fabs(fs.mean_z) < 4.0);
        REQUIRE(fs.normality_tested);
    }
    const FunctionalSummary& vol = rep.functionals[0];
    REQUIRE(vol.name == "volume");
    REQUIRE(vol.has_theory_var);
    REQUIRE(vol.theory_var > 0.0);
    REQUIRE(vol.var_pass);
    REQUIRE(rep.runtime_seconds > 0.0);
}

TEST_CASE("variance scan", "[experiments]") {
    Config c;
    c.d = 2;
    c.gamma = 0.5;
    c.radius_kind = "fixed";
    c.radius_r = 1.0;
    c.window_R = 3.0;
    c.replicates = 120;
    c.mc_samples = 20000;
    c.master_seed = 5150;
    c.functionals = "volume";

    VarianceScan scan = variance_scan(c, {3.0, 4.0});
    REQUIRE(scan.rows.size() == 2);
    REQUIRE(scan.asymptotic > 0.0);
    REQUIRE(scan.c_lo == 0.5 * scan.asymptotic);
    REQUIRE(scan.c_hi == 1.5 * scan.asymptotic);
    for (const auto& row : scan.rows) {
        REQUIRE(row.ratio_ci.lo < row.ratio_ci.hi);
        REQUIRE(row.ratio > 0.0);
        REQUIRE(row.theory_ratio > 0.0);
        REQUIRE(row.theory_ratio < scan.asymptotic);
        REQUIRE(row.ratio_ci.lo < row.theory_ratio);
        REQUIRE(row.theory_ratio < row.ratio_ci.hi);
    }
    REQUIRE(scan.rows[0].theory_ratio < scan.rows[1].theory_ratio);

    REQUIRE_THROWS(variance_scan(c, {}));
    REQUIRE_THROWS(variance_scan(c, {4.0, 3.0}));
}

TEST_CASE("multivariate check", "[experiments]") {
    Config c;
    c.d = 2;
    c.gamma = 0.5;
    c.radius_kind = "fixed";
    c.radius_r = 1.0;
    c.window_R = 4.0;
    c.replicates = 500;
    c.mc_samples = 20000;
    c.surface_samples = 200;
    c.master_seed = 31337;

    SECTION("zero intensity is skipped") {
        Config z = c;
        z.gamma = 0.0;
        MultivariateReport rep = multivariate_check(z);
        REQUIRE(rep.skipped);
        REQUIRE(rep.pass);
    }

    SECTION("too few replicates is an error") {
        Config small = c;
        small.replicates = 250;
        REQUIRE_THROWS(multivariate_check(small));
    }

    SECTION("joint behavior at the default window") {
        MultivariateReport rep = multivariate_check(c);
        REQUIRE_FALSE(rep.skipped);
        // Dense regime: extra volume means extra overlap and less boundary,
        // so the correlation is negative.
        REQUIRE(rep.corr_empirical < 0.0);
        REQUIRE(rep.corr_theory < 0.0);
        REQUIRE(std::fabs(rep.corr_z) < 3.0);
        INFO("volume AD " << rep.volume_normality.statistic << ", surface AD "
                          << rep.surface_normality.statistic);
        REQUIRE(rep.volume_normality.pass);
        REQUIRE(rep.surface_normality.pass);
        REQUIRE(rep.pass);
        nlohmann::json j = to_json(rep);
        REQUIRE(j["pass"].get<bool>());
    }
}
