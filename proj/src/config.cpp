#include "bda/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bda::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        fail(line, "not a number: '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(out)) fail(line, "not a finite number: '" + v + "'");
    return out;
}

template <class Int>
Int to_int(const std::string& v, int line) {
    Int out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(line, "not an integer: '" + v + "'");
    return out;
}

std::vector<std::pair<int, int>> to_pairs(const std::string& v, int line) {
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto x = item.find('x');
        if (x == std::string::npos) fail(line, "sweep entries look like NFxNC, got '" + item + "'");
        out.emplace_back(to_int<int>(trim(item.substr(0, x)), line), to_int<int>(trim(item.substr(x + 1)), line));
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto real = [&](const char* key, double RunConfig::*m) {
            t[key] = [m](RunConfig& c, const std::string& v, int line) { c.*m = to_double(v, line); };
        };
        auto integer = [&](const char* key, int RunConfig::*m) {
            t[key] = [m](RunConfig& c, const std::string& v, int line) { c.*m = to_int<int>(v, line); };
        };
        auto text = [&](const char* key, std::string RunConfig::*m) {
            t[key] = [m](RunConfig& c, const std::string& v, int) { c.*m = v; };
        };
        real("ra", &RunConfig::ra);
        real("pr", &RunConfig::pr);
        real("aspect", &RunConfig::aspect);
        integer("nx1", &RunConfig::nx1);
        integer("nx2", &RunConfig::nx2);
        real("cfl", &RunConfig::cfl);
        real("dt", &RunConfig::dt);
        integer("dt_check_interval", &RunConfig::dt_check_interval);
        real("mu", &RunConfig::mu);
        text("interpolant", &RunConfig::interpolant);
        integer("nf", &RunConfig::nf);
        integer("nc", &RunConfig::nc);
        integer("mx1", &RunConfig::mx1);
        integer("mx2", &RunConfig::mx2);
        real("t_final", &RunConfig::t_final);
        real("sample_dt", &RunConfig::sample_dt);
        t["seed"] = [](RunConfig& c, const std::string& v, int line) { c.seed = to_int<std::uint64_t>(v, line); };
        real("amplitude", &RunConfig::amplitude);
        real("spinup_window", &RunConfig::spinup_window);
        real("spinup_tolerance", &RunConfig::spinup_tolerance);
        real("spinup_max_time", &RunConfig::spinup_max_time);
        integer("coarse_nx1", &RunConfig::coarse_nx1);
        integer("coarse_nx2", &RunConfig::coarse_nx2);
        real("coarse_dt", &RunConfig::coarse_dt);
        real("settle_time", &RunConfig::settle_time);
        text("out_dir", &RunConfig::out_dir);
        text("reference_checkpoint", &RunConfig::reference_checkpoint);
        real("c0", &RunConfig::c0);
        real("rho_a", &RunConfig::rho_a);
        real("rho_b", &RunConfig::rho_b);
        t["sweep"] = [](RunConfig& c, const std::string& v, int line) { c.sweep = to_pairs(v, line); };
        return t;
    }();
    return table;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

RunConfig parse(std::istream& in) {
    RunConfig c;
    std::string raw;
    int line = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail(line, "unknown key '" + key + "'");
        if (seen.count(key)) fail(line, "duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
        seen[key] = line;
        it->second(c, value, line);
    }
    validate(c);
    return c;
}

RunConfig parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

void validate(const RunConfig& c) {
    require(c.ra > 0.0, "ra must be positive");
    require(c.pr > 0.0, "pr must be positive");
    require(c.aspect > 0.0, "aspect must be positive");
    require(c.nx1 >= 8 && c.nx1 % 2 == 0, "nx1 must be even and >= 8");
    require(c.nx2 >= 9, "nx2 must be >= 9");
    require(c.cfl > 0.0 && c.cfl <= 1.0, "cfl must be in (0, 1]");
    require(c.dt >= 0.0, "dt must be >= 0 (0 selects the stability estimate)");
    require(c.dt_check_interval >= 0, "dt_check_interval must be >= 0");
    require(c.mu >= 0.0, "mu must be >= 0");
    require(c.interpolant == "projection" || c.interpolant == "local_average",
            "interpolant must be 'projection' or 'local_average'");
    require(c.t_final > 0.0, "t_final must be positive");
    require(c.sample_dt > 0.0, "sample_dt must be positive");
    require(c.amplitude >= 0.0, "amplitude must be >= 0");
    require(c.spinup_window > 0.0, "spinup_window must be positive");
    require(c.spinup_tolerance > 0.0, "spinup_tolerance must be positive");
    require(c.spinup_max_time > 0.0, "spinup_max_time must be positive");
    require((c.coarse_nx1 == 0) == (c.coarse_nx2 == 0), "coarse_nx1 and coarse_nx2 must be set together");
    if (c.coarse_nx1 != 0) {
        require(c.coarse_nx1 >= 8 && c.coarse_nx1 % 2 == 0, "coarse_nx1 must be even and >= 8");
        require(c.coarse_nx2 >= 9, "coarse_nx2 must be >= 9");
    }
    require(c.coarse_dt >= 0.0, "coarse_dt must be >= 0");
    require(c.settle_time >= 0.0, "settle_time must be >= 0");
    require(!c.out_dir.empty(), "out_dir must not be empty");
    require(c.c0 > 0.0 && c.rho_a > 0.0 && c.rho_b > 0.0, "c0, rho_a, rho_b must be positive");
    try {
        const Grid g(c.nx1, c.nx2, c.aspect);
        assim::validate(interpolant(c), g);
        for (const auto& [nf, nc] : c.sweep) assim::validate(interpolant(c, nf, nc), g);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void write(std::ostream& os, const RunConfig& c) {
    const auto prec = os.precision(17);
    os << "ra = " << c.ra << "\npr = " << c.pr << "\naspect = " << c.aspect << "\nnx1 = " << c.nx1
       << "\nnx2 = " << c.nx2 << "\ncfl = " << c.cfl << "\ndt = " << c.dt
       << "\ndt_check_interval = " << c.dt_check_interval << "\nmu = " << c.mu << "\ninterpolant = " << c.interpolant
       << "\nnf = " << c.nf << "\nnc = " << c.nc << "\nmx1 = " << c.mx1 << "\nmx2 = " << c.mx2
       << "\nt_final = " << c.t_final << "\nsample_dt = " << c.sample_dt << "\nseed = " << c.seed
       << "\namplitude = " << c.amplitude << "\nspinup_window = " << c.spinup_window
       << "\nspinup_tolerance = " << c.spinup_tolerance << "\nspinup_max_time = " << c.spinup_max_time
       << "\ncoarse_nx1 = " << c.coarse_nx1 << "\ncoarse_nx2 = " << c.coarse_nx2 << "\ncoarse_dt = " << c.coarse_dt
       << "\nsettle_time = " << c.settle_time << "\nout_dir = " << c.out_dir
       << "\nreference_checkpoint = " << c.reference_checkpoint << "\nc0 = " << c.c0 << "\nrho_a = " << c.rho_a
       << "\nrho_b = " << c.rho_b << "\nsweep = ";
    for (std::size_t n = 0; n < c.sweep.size(); ++n)
        os << (n ? ", " : "") << c.sweep[n].first << "x" << c.sweep[n].second;
    os << "\n";
    os.precision(prec);
}

convection::PhysParams physical(const RunConfig& c) { return {c.ra, c.pr, c.aspect}; }

Grid grid(const RunConfig& c) { return {c.nx1, c.nx2, c.aspect}; }

assim::InterpolantSpec interpolant(const RunConfig& c) { return interpolant(c, c.nf, c.nc); }

assim::InterpolantSpec interpolant(const RunConfig& c, int nf, int nc) {
    if (c.interpolant == "local_average") return assim::LocalAverage{c.mx1, c.mx2};
    return assim::SpectralProjection{nf, nc};
}

convection::StepControl step_control(const RunConfig& c) { return {c.cfl, c.dt, c.dt_check_interval}; }

theory::BoundInputs bound_inputs(const RunConfig& c) {
    return {c.ra, c.pr, c.aspect, c.mu, assim::resolution(interpolant(c), c.aspect), c.c0, c.rho_a, c.rho_b};
}

}  // namespace bda::config
