#include <CLI11.hpp>
#include <iostream>

#include "bda/commands.hpp"

int main(int argc, char** argv) {
    using namespace bda;

    CLI::App app{"Rayleigh-Benard convection with vorticity-only data assimilation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    bool long_run = false;
    unsigned jobs = 0;
    std::uint64_t seed = 0;
    std::string out_dir;
    app.add_option("--config", config_path, "key = value run configuration (defaults when omitted)");
    app.add_flag("--long", long_run, "allow paper-scale runs (Ra >= 2.5e7)");
    app.add_option("--jobs", jobs, "worker threads for sweep (default: available cores)");
    auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
    auto* out_opt = app.add_option("--out", out_dir, "override the configured output directory");

    auto* reference = app.add_subcommand("reference", "spin up an on-attractor reference state");
    auto* twin = app.add_subcommand("twin", "run a twin assimilation experiment");
    auto* sweep = app.add_subcommand("sweep", "twin runs over the configured (nF, nC) pairs");
    auto* bounds = app.add_subcommand("bounds", "report the rigorous sufficient conditions");
    auto* plotdata = app.add_subcommand("plotdata", "convert a twin time series to log10 columns");
    std::string series;
    plotdata->add_option("timeseries", series, "CSV written by twin or sweep")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return app::kConfigError;
    }

    app::Options opt;
    opt.long_run = long_run;
    opt.jobs = jobs;
    if (*seed_opt) opt.seed = seed;
    if (*out_opt) opt.out_dir = out_dir;
    opt.log = &std::cout;

    return app::guarded(
        [&] {
            if (*plotdata) {
                app::cmd_plotdata(series, opt);
                return;
            }
            const config::RunConfig cfg = config_path.empty() ? config::RunConfig{} : config::load(config_path);
            if (*reference) {
                app::cmd_reference(cfg, opt);
            } else if (*twin) {
                app::cmd_twin(cfg, opt);
            } else if (*sweep) {
                app::cmd_sweep(cfg, opt);
            } else if (*bounds) {
                app::cmd_bounds(cfg, opt, std::cout);
            }
        },
        std::cerr);
}
