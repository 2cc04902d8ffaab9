// Command-line front end: configuration-driven simulation, theory tables,
// covering verification, kinematic identity checks, experiment reports, and
// plot-ready realization dumps.  Exit codes: 0 success, 1 check failure,
// 2 configuration or argument error.

#include "hypbool/config.hpp"
#include "hypbool/covering.hpp"
#include "hypbool/experiments.hpp"
#include "hypbool/geometry.hpp"
#include "hypbool/isometry.hpp"
#include "hypbool/models.hpp"
#include "hypbool/point.hpp"
#include "hypbool/process.hpp"
#include "hypbool/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace hypbool;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Writes to the file when a path is given, else to stdout.
class OutputTarget {
  public:
    explicit OutputTarget(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    bool to_file() const { return !path_.empty(); }

  private:
    std::string path_;
    std::ofstream file_;
};

std::string prefixed_echo(const Config& config) {
    std::istringstream in(echo_config(config));
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) out << "# " << line << "\n";
    return out.str();
}

int cmd_theory(const Config& config) {
    ModelParams params = resolved_params(config);
    GrainMoments gm = grain_moments(params);
    const int d = config.d;
    const double R = config.window_R;
    const double wv = ball_volume(d, R);
    const double ws = sphere_area(d, R);
    std::cout << echo_config(config) << "\n";
    std::cout << "volume_fraction = " << g17(-std::expm1(-params.gamma * gm.v[std::size_t(d)]))
              << "\n";
    std::cout << "mean_volume = " << g17(mean_volume(wv, gm, params.gamma)) << "\n";
    std::cout << "mean_surface = " << g17(mean_surface(wv, ws, gm, params.gamma)) << "\n";
    if (d == 2)
        std::cout << "mean_euler = " << g17(mean_euler_2d(ws, wv, gm, params.gamma)) << "\n";
    std::vector<double> window(std::size_t(d) + 1);
    for (int m = 0; m <= d; ++m)
        window[std::size_t(m)] = renorm_const(d, m) * intrinsic_volume_ball(d, m, R);
    for (int k = 0; k < d; ++k)
        std::cout << "mean_v0_" << k << " = "
                  << g17(mean_intrinsic_k0(k, window, gm, params.gamma)) << "\n";
    for (int k = 0; k < d; ++k)
        std::cout << "density_v" << k << " = " << g17(asymptotic_density_k(k, gm, params.gamma))
                  << "\n";
    std::cout << "var_volume_window = " << g17(var_volume_exact(params, R)) << "\n";
    std::cout << "var_volume_asymptotic = " << g17(var_volume_asymptotic(params)) << "\n";
    return 0;
}

int cmd_simulate(const Config& config) {
    std::vector<ReplicateRecord> recs = simulate_replicates(config);
    OutputTarget out(config.out_csv);
    out.stream() << prefixed_echo(config);
    write_replicates_csv(out.stream(), recs);
    if (out.to_file())
        std::cout << "wrote " << recs.size() << " replicates to " << config.out_csv << "\n";
    return 0;
}

int cmd_report(const Config& config) {
    std::vector<ReplicateRecord> recs;
    SummaryReport report = run_experiment(config, &recs);
    bool pass = true;
    for (const FunctionalSummary& fs : report.functionals) {
        bool ok = std::fabs(fs.mean_z) <= 3.0 && fs.var_pass
               && (!fs.normality_tested || fs.normality_pass);
        std::cerr << fs.name << ": mean_z = " << g17(fs.mean_z) << (ok ? " ok" : " FAIL") << "\n";
        pass = pass && ok;
    }
    nlohmann::json j = to_json(report);
    j["pass"] = pass;
    {
        OutputTarget out(config.out_json);
        out.stream() << j.dump(2) << "\n";
    }
    if (!config.out_csv.empty()) {
        OutputTarget csv(config.out_csv);
        csv.stream() << prefixed_echo(config);
        write_replicates_csv(csv.stream(), recs);
    }
    return pass ? 0 : 1;
}

int cmd_verify_cover(int d, long points, long boxes, unsigned long long seed, double efolds,
                     const std::string& out_path) {
    CoverReport rep = verify_covering(d, points, boxes, seed, efolds);
    bool pass = rep.coverage_failures == 0 && rep.box_failures == 0;
    nlohmann::json j;
    j["d"] = d;
    j["points_tested"] = rep.points_tested;
    j["coverage_failures"] = rep.coverage_failures;
    j["max_overlap"] = rep.max_overlap;
    j["decade_max_overlap"] = nlohmann::json::object();
    for (const auto& [decade, m] : rep.decade_max_overlap)
        j["decade_max_overlap"][std::to_string(decade)] = m;
    j["box_checks"] = rep.box_checks;
    j["box_failures"] = rep.box_failures;
    j["pass"] = pass;
    OutputTarget out(out_path);
    out.stream() << j.dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_kinematic(int d, int k, double ra, double rb, double tol) {
    KinematicReport rep = kinematic_check(d, k, ra, rb);
    std::cout << "lhs = " << g17(rep.lhs) << "\n";
    std::cout << "rhs = " << g17(rep.rhs) << "\n";
    std::cout << "rel_error = " << g17(rep.rel_error) << "\n";
    bool pass = rep.rel_error <= tol;
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

int cmd_dump(const Config& config, const std::string& out_override) {
    if (config.d != 2 && config.d != 3)
        throw std::invalid_argument("dump-realization: d = 2 or d = 3 required");
    const int d = config.d;
    ModelParams params = resolved_params(config);
    SplitMix64 rng = SplitMix64::stream(config.master_seed, 0);
    Realization real = sample_realization(rng, params, config.window_R);

    OutputTarget out(out_override.empty() ? config.out_txt : out_override);
    std::ostream& os = out.stream();
    const int n_boundary = 64;
    os << "# realization dump: Poincare ball coordinates\n";
    os << prefixed_echo(config);
    os << "# grains = " << real.grains.size() << "\n";
    os << "# line: center[" << d << "] radius boundary[" << n_boundary << " x " << d << "]\n";
    for (const Grain& grain : real.grains) {
        Isometry boost = translation_to(grain.center);
        BallCoords center = to_poincare_ball(grain.center);
        for (int i = 0; i < d; ++i) os << (i ? " " : "") << g17(center[i]);
        os << " " << g17(grain.radius);
        for (int j = 0; j < n_boundary; ++j) {
            TangentVec u;
            u.d = d;
            if (d == 2) {
                double th = 2.0 * pi * j / n_boundary;
                u[1] = std::cos(th);
                u[2] = std::sin(th);
            } else {
                // Golden-angle spiral: 64 nearly even directions.
                double z = 1.0 - 2.0 * (j + 0.5) / n_boundary;
                double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
                double th = 2.0 * pi * j * 0.61803398874989485;
                u[1] = rxy * std::cos(th);
                u[2] = rxy * std::sin(th);
                u[3] = z;
            }
            Point bp = apply(boost, exp_map(base_point(d), u, grain.radius));
            if (std::fabs(dist(bp, grain.center) - grain.radius) > 1e-8)
                throw std::runtime_error("dump-realization: boundary point self-check failed");
            BallCoords b = to_poincare_ball(bp);
            for (int i = 0; i < d; ++i) os << " " << g17(b[i]);
        }
        os << "\n";
    }
    if (out.to_file())
        std::cout << "wrote " << real.grains.size() << " grains\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary Boolean models in hyperbolic space: "
                 "simulation, moment formulas, and verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int d = 2;
    int k = 2;
    long points = 1000000;
    long boxes = 10000;
    unsigned long long seed = 1;
    double efolds = 20.0;
    double ra = 1.0, rb = 1.0, tol = 1e-6;

    CLI::App* sim = app.add_subcommand("simulate", "run replicates and write their estimates");
    sim->add_option("--config", config_path, "config file")->required();

    CLI::App* theory = app.add_subcommand("theory", "print the moment table for a config");
    theory->add_option("--config", config_path, "config file")->required();

    CLI::App* cover = app.add_subcommand("verify-cover", "verify the economic covering lattice");
    cover->add_option("--d", d, "dimension");
    cover->add_option("--points", points, "coverage query points");
    cover->add_option("--boxes", boxes, "box inclusion checks");
    cover->add_option("--seed", seed, "stream seed");
    cover->add_option("--efolds", efolds, "height range, e-folds around 1");
    cover->add_option("--out", out_path, "JSON report path (default stdout)");

    CLI::App* kin = app.add_subcommand("kinematic", "check a product identity on a ball pair");
    kin->add_option("--d", d, "dimension");
    kin->add_option("--k", k, "functional index");
    kin->add_option("--ra", ra, "first radius");
    kin->add_option("--rb", rb, "second radius");
    kin->add_option("--tol", tol, "relative error bound");

    CLI::App* report = app.add_subcommand("report", "run the experiment harness");
    report->add_option("--config", config_path, "config file")->required();

    CLI::App* dump = app.add_subcommand("dump-realization",
                                        "sample one realization, write plot-ready coordinates");
    dump->add_option("--config", config_path, "config file")->required();
    dump->add_option("--out", out_path, "output path (default: out_txt from config, else stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Config config;
    if (!config_path.empty()) {
        try {
            config = load_config(config_path);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    }

    try {
        if (sim->parsed()) return cmd_simulate(config);
        if (theory->parsed()) return cmd_theory(config);
        if (cover->parsed()) return cmd_verify_cover(d, points, boxes, seed, efolds, out_path);
        if (kin->parsed()) return cmd_kinematic(d, k, ra, rb, tol);
        if (report->parsed()) return cmd_report(config);
        if (dump->parsed()) return cmd_dump(config, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
