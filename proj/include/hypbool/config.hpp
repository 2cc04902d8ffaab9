#pragma once

// Flat `key = value` configuration shared by the experiment harness and the
// command-line tools.  `#` starts a comment.  Echoing a parsed config writes
// every key with numbers at 17 significant digits, so the echo parses back to
// an identical Config.

#include "hypbool/geometry.hpp"
#include "hypbool/process.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypbool {

struct Config {
    int d = 2;
    double gamma = 0.0;              // direct intensity; takes precedence when > 0
    double grains_per_window = 0.0;  // alternative: expected centers in the window ball
    std::string radius_kind = "fixed";
    double radius_r = 1.0;           // fixed radius
    double radius_a = 0.0;           // uniform radius bounds
    double radius_b = 1.0;
    double window_R = 5.0;
    long replicates = 200;
    unsigned long long master_seed = 1;
    long mc_samples = 100000;        // hit-or-miss samples per replicate
    long surface_samples = 200;      // boundary samples per grain per replicate
    std::string functionals = "volume,surface";
    std::string out_json;
    std::string out_csv;
    std::string out_txt;
};

inline bool operator==(const Config& a, const Config& b) {
    return a.d == b.d && a.gamma == b.gamma && a.grains_per_window == b.grains_per_window
        && a.radius_kind == b.radius_kind && a.radius_r == b.radius_r && a.radius_a == b.radius_a
        && a.radius_b == b.radius_b && a.window_R == b.window_R && a.replicates == b.replicates
        && a.master_seed == b.master_seed && a.mc_samples == b.mc_samples
        && a.surface_samples == b.surface_samples && a.functionals == b.functionals
        && a.out_json == b.out_json && a.out_csv == b.out_csv && a.out_txt == b.out_txt;
}

inline const char* config_key_list() {
    return "d, gamma, grains_per_window, radius, window_R, replicates, master_seed, "
           "mc_samples, surface_samples, functionals, out_json, out_csv, out_txt";
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
}

inline long parse_count(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
    }
}

inline unsigned long long parse_seed(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad seed value for '" + key + "': " + value);
    }
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// The radius key mirrors the two supported distributions:
//   radius = fixed <r>
//   radius = uniform <a> <b>
inline void parse_radius_value(const std::string& value, Config& c) {
    std::istringstream in(value);
    std::string kind;
    in >> kind;
    if (kind == "fixed") {
        double r = 0.0;
        if (!(in >> r)) throw std::invalid_argument("config: radius = fixed <r> expected");
        c.radius_kind = "fixed";
        c.radius_r = r;
    } else if (kind == "uniform") {
        double a = 0.0, b = 0.0;
        if (!(in >> a >> b)) throw std::invalid_argument("config: radius = uniform <a> <b> expected");
        c.radius_kind = "uniform";
        c.radius_a = a;
        c.radius_b = b;
    } else {
        throw std::invalid_argument("config: radius kind must be 'fixed' or 'uniform', got '"
                                    + kind + "'");
    }
    std::string rest;
    if (in >> rest)
        throw std::invalid_argument("config: trailing tokens in radius value: " + rest);
}

inline void check_config(const Config& c) {
    check_dim(c.d);
    if (!(c.gamma >= 0.0)) throw std::invalid_argument("config: gamma >= 0 required");
    if (!(c.grains_per_window >= 0.0))
        throw std::invalid_argument("config: grains_per_window >= 0 required");
    if (c.radius_kind == "fixed") {
        if (!(c.radius_r > 0.0)) throw std::invalid_argument("config: fixed radius > 0 required");
    } else if (c.radius_kind == "uniform") {
        if (!(c.radius_a >= 0.0 && c.radius_a < c.radius_b))
            throw std::invalid_argument("config: uniform radius needs 0 <= a < b");
    } else {
        throw std::invalid_argument("config: radius kind must be 'fixed' or 'uniform'");
    }
    if (!(c.window_R > 0.0)) throw std::invalid_argument("config: window_R > 0 required");
    if (c.replicates < 1) throw std::invalid_argument("config: replicates >= 1 required");
    if (c.mc_samples < 1) throw std::invalid_argument("config: mc_samples >= 1 required");
    if (c.surface_samples < 1) throw std::invalid_argument("config: surface_samples >= 1 required");
    std::istringstream fl(c.functionals);
    std::string name;
    bool any = false;
    while (std::getline(fl, name, ',')) {
        name = detail::trim(name);
        if (name.empty()) continue;
        any = true;
        if (name != "volume" && name != "surface" && name != "euler")
            throw std::invalid_argument("config: unknown functional '" + name
                                        + "' (valid: volume, surface, euler)");
        if (name == "euler" && c.d != 2)
            throw std::invalid_argument("config: the euler functional requires d = 2");
    }
    if (!any) throw std::invalid_argument("config: functionals must name at least one functional");
}

inline Config parse_config(std::istream& in) {
    Config c;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected 'key = value', got: " + line);
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key == "d") c.d = int(detail::parse_count(key, value));
        else if (key == "gamma") c.gamma = detail::parse_real(key, value);
        else if (key == "grains_per_window") c.grains_per_window = detail::parse_real(key, value);
        else if (key == "radius") parse_radius_value(value, c);
        else if (key == "window_R") c.window_R = detail::parse_real(key, value);
        else if (key == "replicates") c.replicates = detail::parse_count(key, value);
        else if (key == "master_seed") c.master_seed = detail::parse_seed(key, value);
        else if (key == "mc_samples") c.mc_samples = detail::parse_count(key, value);
        else if (key == "surface_samples") c.surface_samples = detail::parse_count(key, value);
        else if (key == "functionals") c.functionals = value;
        else if (key == "out_json") c.out_json = value;
        else if (key == "out_csv") c.out_csv = value;
        else if (key == "out_txt") c.out_txt = value;
        else
            throw std::invalid_argument("config: unknown key '" + key + "' (valid keys: "
                                        + config_key_list() + ")");
    }
    check_config(c);
    return c;
}

inline Config parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open file: " + path);
    return parse_config(in);
}

inline std::string echo_config(const Config& c) {
    std::ostringstream out;
    out << "d = " << c.d << "\n";
    out << "gamma = " << detail::format_real(c.gamma) << "\n";
    out << "grains_per_window = " << detail::format_real(c.grains_per_window) << "\n";
    if (c.radius_kind == "fixed")
        out << "radius = fixed " << detail::format_real(c.radius_r) << "\n";
    else
        out << "radius = uniform " << detail::format_real(c.radius_a) << " "
            << detail::format_real(c.radius_b) << "\n";
    out << "window_R = " << detail::format_real(c.window_R) << "\n";
    out << "replicates = " << c.replicates << "\n";
    out << "master_seed = " << c.master_seed << "\n";
    out << "mc_samples = " << c.mc_samples << "\n";
    out << "surface_samples = " << c.surface_samples << "\n";
    out << "functionals = " << c.functionals << "\n";
    out << "out_json = " << c.out_json << "\n";
    out << "out_csv = " << c.out_csv << "\n";
    out << "out_txt = " << c.out_txt << "\n";
    return out.str();
}

// Intensity resolution: an explicit gamma wins; otherwise grains_per_window
// is divided by the window volume, matching the reference-figure style of
// specifying the process by its expected count in the display window.
inline ModelParams resolved_params(const Config& c) {
    check_config(c);
    ModelParams p;
    p.d = c.d;
    if (c.gamma > 0.0)
        p.gamma = c.gamma;
    else
        p.gamma = c.grains_per_window / ball_volume(c.d, c.window_R);
    if (c.radius_kind == "fixed")
        p.radius = RadiusDistribution::fixed(c.radius_r);
    else
        p.radius = RadiusDistribution::uniform(c.radius_a, c.radius_b);
    return p;
}

}  // namespace hypbool
