#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bda/assim.hpp"
#include "bda/convection.hpp"
#include "bda/theory.hpp"

namespace bda::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat "key = value" run configuration. Lines starting with '#' and blank
/// lines are ignored; unknown keys and malformed values are errors.
struct RunConfig {
    double ra = 1e6;
    double pr = 1.0;
    double aspect = 2.0;
    int nx1 = 128;
    int nx2 = 65;

    double cfl = 0.5;
    double dt = 0.0;  // > 0 overrides the stability estimate
    int dt_check_interval = 50;

    double mu = 1.0;
    std::string interpolant = "projection";  // or "local_average"
    int nf = 8;
    int nc = 8;
    int mx1 = 4;
    int mx2 = 4;

    double t_final = 20.0;
    double sample_dt = 0.1;

    std::uint64_t seed = 1;
    double amplitude = 0.1;
    double spinup_window = 5.0;
    double spinup_tolerance = 0.01;
    double spinup_max_time = 200.0;
    // Optional coarse spin-up grid (0 = spin up on the run grid), its time
    // step, and the time integrated on the run grid after resampling.
    int coarse_nx1 = 0;
    int coarse_nx2 = 0;
    double coarse_dt = 0.0;
    double settle_time = 0.0;

    std::string out_dir = ".";
    std::string reference_checkpoint;  // cmd_twin input; empty = spin up first

    double c0 = 1.0;
    double rho_a = 1.0;
    double rho_b = 1.0;

    std::vector<std::pair<int, int>> sweep;  // (nF, nC) pairs for cmd_sweep
};

RunConfig parse(std::istream& in);
RunConfig parse_string(const std::string& text);
RunConfig load(const std::string& path);

/// Cross-field checks (positivity, grid shape, interpolant fit). Called by
/// parse; exposed for configs built in code.
void validate(const RunConfig& c);

/// Writes every key, so the output parses back to the same config.
void write(std::ostream& os, const RunConfig& c);

convection::PhysParams physical(const RunConfig& c);
Grid grid(const RunConfig& c);
assim::InterpolantSpec interpolant(const RunConfig& c);
assim::InterpolantSpec interpolant(const RunConfig& c, int nf, int nc);
convection::StepControl step_control(const RunConfig& c);
theory::BoundInputs bound_inputs(const RunConfig& c);

/// Ra at or above which a run counts as paper scale and needs --long.
inline constexpr double kLongRunRa = 2.5e7;

}  // namespace bda::config
