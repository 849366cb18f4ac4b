#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "bda/commands.hpp"
#include "bda/io.hpp"
#include "doctest.h"

using namespace bda;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "bda_cmd_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

config::RunConfig tiny(const fs::path& out) {
    config::RunConfig c = config::parse_string(
        "ra = 2e4\nnx1 = 16\nnx2 = 9\nnf = 3\nnc = 4\nt_final = 0.5\nsample_dt = 0.05\ndt = 0.005\n"
        "spinup_window = 1\nspinup_max_time = 4\nspinup_tolerance = 1e-6\n");
    c.out_dir = out.string();
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BDA_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("paper-scale Ra needs --long") {
    config::RunConfig c;
    c.ra = 2.5e7;
    CHECK_THROWS_AS(app::effective(c, {}), config::ConfigError);
    app::Options opt;
    opt.long_run = true;
    opt.seed = 9;
    opt.out_dir = "elsewhere";
    const auto e = app::effective(c, opt);
    CHECK(e.seed == 9);
    CHECK(e.out_dir == "elsewhere");
}

TEST_CASE("bounds report at the default desk-scale configuration") {
    const auto dir = fresh_dir("bounds");
    app::Options opt;
    opt.out_dir = dir.string();
    std::ostringstream os;
    const auto r = app::cmd_bounds(config::RunConfig{}, opt, os);
    CHECK(r.mu_below_bound());
    CHECK(r.h_above_bound());
    CHECK(os.str().find("h_above_bound=1") != std::string::npos);
    CHECK(fs::exists(dir / "bounds.txt"));
}

TEST_CASE("subcritical reference decays to conduction") {
    const auto dir = fresh_dir("subcritical");
    auto c = tiny(dir);
    c.ra = 1e3;
    c.nx2 = 9;
    c.dt = 0.0;
    c.spinup_window = 2.0;
    c.spinup_tolerance = 1e-4;
    c.spinup_max_time = 60.0;
    const auto out = app::cmd_reference(c, {});
    CHECK(out.run.spun_up);
    CHECK(std::abs(out.run.nu_window_mean - 1.0) < 1e-3);
}

TEST_CASE("reference checkpoint hash is reproducible for a fixed seed") {
    const auto a = app::cmd_reference(tiny(fresh_dir("ref_a")), {});
    const auto b = app::cmd_reference(tiny(fresh_dir("ref_b")), {});
    app::Options other;
    other.seed = 2;
    const auto c = app::cmd_reference(tiny(fresh_dir("ref_c")), other);
    CHECK(a.checkpoint_hash == b.checkpoint_hash);
    CHECK(a.checkpoint_hash != c.checkpoint_hash);
    CHECK(fs::exists(a.nusselt_series));
    const auto ck = io::read_checkpoint(a.checkpoint);
    CHECK(ck.state.grid().nx1() == 16);
}

TEST_CASE("coarse spin-up is resampled onto the run grid") {
    auto c = tiny(fresh_dir("coarse"));
    c.nx2 = 17;
    c.coarse_nx1 = 8;
    c.coarse_nx2 = 9;
    c.coarse_dt = 0.005;
    c.settle_time = 0.1;
    const auto r = app::make_reference(c);
    CHECK(r.state.grid().nx1() == 16);
    CHECK(r.state.grid().nx2() == 17);
    CHECK(r.times.size() == r.nusselt.size());
}

TEST_CASE("twin, plotdata and sweep on a tiny grid") {
    const auto dir = fresh_dir("twin");
    auto c = tiny(dir);
    const auto ref = app::cmd_reference(c, {});
    c.reference_checkpoint = ref.checkpoint;
    const auto tw = app::cmd_twin(c, {});
    CHECK(tw.result.records.front().t == 0.0);
    CHECK(tw.result.records.size() == 11);
    CHECK(tw.result.steps == 100);
    CHECK(fs::exists(tw.timeseries));
    CHECK(fs::exists(tw.summary));
    CHECK(fs::exists(dir / "twin_reference.ckpt"));
    CHECK(fs::exists(dir / "twin_assimilated.ckpt"));
    CHECK(io::read_timeseries(tw.timeseries) == tw.result.records);

    const std::string dat = app::cmd_plotdata(tw.timeseries, {});
    CHECK(dat == (dir / "twin.dat").string());
    std::ifstream in(dat);
    int lines = 0;
    for (std::string s; std::getline(in, s);) ++lines;
    CHECK(lines == 12);

    c.sweep = {{2, 2}, {3, 4}};
    app::Options opt;
    opt.jobs = 2;
    const auto rows = app::cmd_sweep(c, opt);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].nf == 2);
    CHECK(rows[1].nc == 4);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "sweep_3x4.csv"));
    // The (3, 4) sweep entry repeats the twin run exactly.
    CHECK(io::read_timeseries((dir / "sweep_3x4.csv").string()) == tw.result.records);

    c.sweep.clear();
    CHECK_THROWS_AS(app::cmd_sweep(c, opt), config::ConfigError);

    auto wrong = c;
    wrong.nx1 = 32;
    CHECK_THROWS_AS(app::cmd_twin(wrong, {}), config::ConfigError);
}

TEST_CASE("a diverging assimilated run is a sweep row, not an abort") {
    const auto dir = fresh_dir("sweep_diverged");
    auto c = tiny(dir);
    const auto ref = app::cmd_reference(c, {});
    c.reference_checkpoint = ref.checkpoint;
    // mu * dt = 10 is far outside the RK4 stability region; only the
    // assimilated run feels it.
    c.mu = 2000.0;
    c.sweep = {{3, 4}};
    const auto rows = app::cmd_sweep(c, {});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].diverged);
    CHECK_FALSE(rows[0].verdict.converged);
    CHECK(rows[0].failure.find("assimilated") != std::string::npos);
    CHECK(fs::exists(dir / "sweep_3x4_last_good.ckpt"));
    CHECK(!io::read_timeseries((dir / "sweep_3x4.csv").string()).empty());
    std::ifstream in(dir / "sweep.csv");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find(",diverged\n") != std::string::npos);
}

TEST_CASE("blow-up leaves the last good state on disk") {
    const auto dir = fresh_dir("blowup");
    auto c = tiny(dir);
    c.dt = 50.0;
    c.spinup_max_time = 5000.0;
    std::ostringstream err;
    const int code = app::guarded([&] { app::cmd_reference(c, {}); }, err);
    CHECK(code == app::kBlowup);
    CHECK(fs::exists(dir / "last_good.ckpt"));
    CHECK_NOTHROW(io::read_checkpoint((dir / "last_good.ckpt").string()));
}

TEST_CASE("exceptions map to exit codes") {
    std::ostringstream err;
    CHECK(app::guarded([] {}, err) == app::kOk);
    CHECK(app::guarded([] { throw config::ConfigError("x"); }, err) == app::kConfigError);
    CHECK(app::guarded([] { throw convection::NumericalBlowup("x"); }, err) == app::kBlowup);
    CHECK(app::guarded([] { throw io::IoError("x"); }, err) == app::kIoError);
    CHECK(app::guarded([] { throw io::CheckpointError(io::CheckpointErrorKind::bad_magic, "x"); }, err) == app::kIoError);
    CHECK(app::guarded([] { throw std::runtime_error("x"); }, err) == app::kOtherError);
    CHECK(err.str().find("config error: x") != std::string::npos);
}

TEST_CASE("command-line exit codes") {
    const auto dir = fresh_dir("cli");
    const auto cfg = dir / "run.cfg";
    std::ofstream(cfg) << "ra = 1e4\nnx1 = 16\nnx2 = 9\n";
    const auto bad = dir / "bad.cfg";
    std::ofstream(bad) << "ra = 1e4\nbogus = 1\n";
    const auto big = dir / "big.cfg";
    std::ofstream(big) << "ra = 5e7\n";
    const std::string out = " --out " + dir.string();

    CHECK(run_cli("bounds --config " + cfg.string() + out) == 0);
    CHECK(run_cli("bounds --config " + bad.string() + out) == 2);
    CHECK(run_cli("twin --config " + big.string() + out) == 2);
    CHECK(run_cli("bounds --config " + (dir / "missing.cfg").string() + out) == 2);
    CHECK(run_cli("--bogus") == 2);
    CHECK(run_cli("plotdata " + (dir / "missing.csv").string()) == 4);
    CHECK(run_cli("bounds --config " + cfg.string() + " --out /proc/forbidden") == 4);
    CHECK(run_cli("--help") == 0);
}

}
