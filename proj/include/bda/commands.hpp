#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bda/config.hpp"

namespace bda::app {

enum ExitCode : int { kOk = 0, kOtherError = 1, kConfigError = 2, kBlowup = 3, kIoError = 4 };

struct Options {
    bool long_run = false;
    unsigned jobs = 0;  // 0: hardware concurrency
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::ostream* log = nullptr;  // progress and summaries; nullptr silences
};

/// Config with command-line overrides applied; rejects paper-scale Ra
/// without --long.
config::RunConfig effective(config::RunConfig cfg, const Options& opt);

struct ReferenceRun {
    convection::PhysParams params;
    convection::State state;
    std::vector<double> times;
    std::vector<double> nusselt;
    bool spun_up = false;  // windowed Nu criterion met before spinup_max_time
    double nu_window_mean = 0.0;
};

/// Spin-up from the seeded perturbation (optionally on the coarse grid,
/// then resampled and settled on the run grid). No files written.
ReferenceRun make_reference(const config::RunConfig& cfg, std::ostream* log = nullptr);

struct ReferenceOutput {
    ReferenceRun run;
    std::string checkpoint;
    std::string nusselt_series;
    std::uint64_t checkpoint_hash = 0;
};

/// Writes <out>/reference.ckpt and <out>/reference_nu.csv.
ReferenceOutput cmd_reference(const config::RunConfig& cfg, const Options& opt);

struct TwinOutput {
    assim::TwinResult result;
    assim::Verdict verdict;
    theory::BoundReport bounds;
    std::string timeseries;
    std::string summary;
};

/// Loads reference_checkpoint (or spins up a reference), resets the clock
/// to 0 and runs the twin experiment from omega = 0, theta = 1 - x2.
/// Writes <out>/twin.csv, <out>/twin_summary.txt and both final checkpoints.
TwinOutput cmd_twin(const config::RunConfig& cfg, const Options& opt);

struct SweepRow {
    int nf = 0;
    int nc = 0;
    assim::Verdict verdict;  // from the samples taken before any failure
    bool diverged = false;   // the assimilated run blew up
    std::string failure;
};

/// One twin run per configured (nF, nC) pair, run concurrently. Writes
/// <out>/sweep.csv and <out>/sweep_<nF>x<nC>.csv. An assimilated run that blows
/// up is recorded as a diverged row (its last good state goes to
/// <out>/sweep_<nF>x<nC>_last_good.ckpt); a reference failure aborts the sweep.
std::vector<SweepRow> cmd_sweep(const config::RunConfig& cfg, const Options& opt);

/// Writes the report to os (text followed by key=value lines) and to
/// <out>/bounds.txt.
theory::BoundReport cmd_bounds(const config::RunConfig& cfg, const Options& opt, std::ostream& os);

/// Writes <out>/<stem>.dat and returns its path.
std::string cmd_plotdata(const std::string& timeseries, const Options& opt);

/// Runs f, printing any error to err and mapping it to an exit code.
int guarded(const std::function<void()>& f, std::ostream& err);

}  // namespace bda::app
