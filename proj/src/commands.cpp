#include "bda/commands.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "bda/io.hpp"

namespace bda::app {

namespace fs = std::filesystem;
using config::RunConfig;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw io::IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    return (fs::path(cfg.out_dir) / name).string();
}

void say(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << std::flush;
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io::IoError("cannot open " + path);
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return io::fnv1a64(bytes);
}

// Integrates s for `duration` with a fixed or estimated step.
convection::State advance(convection::State s, double duration, const convection::PhysParams& pp,
                          const elliptic::PoissonSolver& ps, const convection::StepControl& sc) {
    convection::TimeStepper stepper(sc, s, pp, ps);
    const double end = s.t + duration;
    while (s.t < end - 0.5 * stepper.dt()) {
        s = convection::step(s, stepper.dt(), pp, ps);
        stepper.observe(s, pp, ps);
    }
    return s;
}

double tail_mean(const std::vector<double>& t, const std::vector<double>& v, double window) {
    if (t.empty()) return 0.0;
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > t.back() - window) {
            sum += v[i];
            ++n;
        }
    return sum / n;
}

std::string verdict_text(const assim::Verdict& v) {
    std::ostringstream os;
    auto line = [&](const char* name, const assim::ChannelVerdict& c) {
        os << "  " << std::left << std::setw(6) << name << " rate " << std::setw(12) << fmt(c.rate) << " r2 "
           << std::setw(10) << fmt(c.r2) << " final/initial " << std::setw(12) << fmt(c.ratio, 3)
           << (c.converged ? " yes" : " no") << "\n";
    };
    line("u", v.u);
    line("theta", v.theta);
    line("omega", v.omega);
    os << "converged: " << (v.converged ? "yes" : "no") << "\n";
    return os.str();
}

convection::State load_or_make_reference(const RunConfig& cfg, std::ostream* log) {
    const Grid g = config::grid(cfg);
    if (cfg.reference_checkpoint.empty()) return make_reference(cfg, log).state;
    io::Checkpoint ck = io::read_checkpoint(cfg.reference_checkpoint);
    const Grid& cg = ck.state.grid();
    if (cg.nx1() != g.nx1() || cg.nx2() != g.nx2() || cg.length() != g.length())
        throw config::ConfigError("reference checkpoint grid " + std::to_string(cg.nx1()) + "x" +
                                  std::to_string(cg.nx2()) + " does not match the configured grid");
    if (ck.params.ra() != cfg.ra || ck.params.pr() != cfg.pr)
        throw config::ConfigError("reference checkpoint Ra/Pr do not match the configuration");
    // Re-home onto the run grid object so all fields share one plan set.
    convection::State s({PhysicalField(g), PhysicalField(g)}, ck.state.t);
    std::copy(ck.state.omega.data().begin(), ck.state.omega.data().end(), s.omega.data().begin());
    std::copy(ck.state.theta.data().begin(), ck.state.theta.data().end(), s.theta.data().begin());
    return s;
}

assim::TwinConfig twin_config(const RunConfig& cfg, const convection::State& reference, int nf, int nc) {
    assim::TwinConfig tc{config::physical(cfg),
                         {cfg.mu, config::interpolant(cfg, nf, nc)},
                         reference,
                         std::nullopt,
                         cfg.t_final,
                         cfg.sample_dt,
                         config::step_control(cfg),
                         "",
                         ""};
    tc.reference.t = 0.0;
    return tc;
}

// NaN policy: keep the last good state on disk, then abort.
template <class F>
auto dumping_last_good(const RunConfig& cfg, std::ostream* log, F&& f) {
    try {
        return f();
    } catch (const convection::NumericalBlowup& e) {
        if (e.last_good()) {
            const std::string path = out_path(cfg, "last_good.ckpt");
            io::write_checkpoint(path, *e.last_good(), config::physical(cfg));
            say(log, "last good state written to " + path + "\n");
        }
        throw;
    }
}

}  // namespace

RunConfig effective(RunConfig cfg, const Options& opt) {
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    config::validate(cfg);
    if (cfg.ra >= config::kLongRunRa && !opt.long_run)
        throw config::ConfigError("Ra = " + fmt(cfg.ra) + " is paper scale (>= 2.5e7); pass --long to run it");
    return cfg;
}

ReferenceRun make_reference(const RunConfig& cfg, std::ostream* log) {
    const auto pp = config::physical(cfg);
    const Grid g = config::grid(cfg);
    const elliptic::PoissonSolver ps(g);
    const bool coarse = cfg.coarse_nx1 > 0;
    const Grid spin_grid = coarse ? Grid(cfg.coarse_nx1, cfg.coarse_nx2, cfg.aspect) : g;
    const elliptic::PoissonSolver spin_ps(spin_grid);

    convection::SpinUpOptions so;
    so.window = cfg.spinup_window;
    so.tolerance = cfg.spinup_tolerance;
    so.max_time = cfg.spinup_max_time;
    so.sample_dt = cfg.sample_dt;
    so.step = config::step_control(cfg);
    if (coarse) so.step.fixed_dt = cfg.coarse_dt;

    say(log, "spin-up on " + std::to_string(spin_grid.nx1()) + "x" + std::to_string(spin_grid.nx2()) +
                 " grid, Ra = " + fmt(cfg.ra) + ", seed " + std::to_string(cfg.seed) + "\n");
    auto spun = convection::spin_up(convection::random_perturbed_ic(spin_grid, cfg.seed, cfg.amplitude), pp,
                                    spin_ps, so);
    ReferenceRun out{pp, std::move(spun.state), std::move(spun.times), std::move(spun.nusselt), spun.converged, 0.0};
    say(log, std::string("spin-up ") + (out.spun_up ? "met" : "did not meet") + " the windowed Nu criterion by t = " +
                 fmt(out.state.t) + "\n");

    if (coarse) {
        out.state = convection::resample(out.state, g, ps);
        if (cfg.settle_time > 0.0) {
            say(log, "settling on the run grid for " + fmt(cfg.settle_time) + " time units\n");
            out.state = advance(out.state, cfg.settle_time, pp, ps, config::step_control(cfg));
            out.times.push_back(out.state.t);
            out.nusselt.push_back(convection::nusselt_instant(out.state, pp, ps));
        }
    }
    out.nu_window_mean = tail_mean(out.times, out.nusselt, cfg.spinup_window);
    return out;
}

ReferenceOutput cmd_reference(const RunConfig& in, const Options& opt) {
    const RunConfig cfg = effective(in, opt);
    ReferenceOutput out{dumping_last_good(cfg, opt.log, [&] { return make_reference(cfg, opt.log); }),
                        out_path(cfg, "reference.ckpt"),
                        out_path(cfg, "reference_nu.csv"), 0};
    io::write_checkpoint(out.checkpoint, out.run.state, out.run.params);
    io::write_nusselt_series(out.nusselt_series, out.run.times, out.run.nusselt);
    out.checkpoint_hash = file_hash(out.checkpoint);
    std::ostringstream os;
    os << "reference t = " << fmt(out.run.state.t) << ", Nu (last " << fmt(cfg.spinup_window)
       << " time units) = " << fmt(out.run.nu_window_mean) << "\n"
       << "checkpoint " << out.checkpoint << " fnv1a64 = " << std::hex << std::setw(16) << std::setfill('0')
       << out.checkpoint_hash << std::dec << "\n";
    say(opt.log, os.str());
    return out;
}

TwinOutput cmd_twin(const RunConfig& in, const Options& opt) {
    const RunConfig cfg = effective(in, opt);
    const convection::State reference = load_or_make_reference(cfg, opt.log);
    assim::TwinConfig tc = twin_config(cfg, reference, cfg.nf, cfg.nc);
    tc.reference_checkpoint_out = out_path(cfg, "twin_reference.ckpt");
    tc.assimilated_checkpoint_out = out_path(cfg, "twin_assimilated.ckpt");

    say(opt.log, "twin run: mu = " + fmt(cfg.mu) + ", " + assim::describe(tc.nudge.interpolant) + ", t_final = " +
                     fmt(cfg.t_final) + "\n");
    TwinOutput out{dumping_last_good(cfg, opt.log, [&] { return assim::run_twin(tc); }), {}, theory::bound_report(config::bound_inputs(cfg)),
                   out_path(cfg, "twin.csv"), out_path(cfg, "twin_summary.txt")};
    out.verdict = assim::assess(out.result.records);
    io::write_timeseries(out.timeseries, out.result.records);

    std::ostringstream os;
    os << "interpolant " << assim::describe(tc.nudge.interpolant) << ", mu = " << fmt(cfg.mu) << ", dt = "
       << fmt(out.result.dt) << ", steps = " << out.result.steps << "\n"
       << "decay fit over the second half of the run:\n"
       << verdict_text(out.verdict) << "\n";
    theory::write_text(os, out.bounds);
    std::ofstream f(out.summary);
    f << os.str();
    if (!f) throw io::IoError("write failed: " + out.summary);
    say(opt.log, os.str());
    return out;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& in, const Options& opt) {
    const RunConfig cfg = effective(in, opt);
    if (cfg.sweep.empty()) throw config::ConfigError("sweep: no (nF, nC) pairs configured (sweep = 8x8, 4x4, ...)");
    if (cfg.interpolant != "projection") throw config::ConfigError("sweep: only the projection interpolant is swept");
    const convection::State reference = load_or_make_reference(cfg, opt.log);

    std::vector<SweepRow> rows(cfg.sweep.size());
    std::vector<std::exception_ptr> errors(cfg.sweep.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t n; (n = next.fetch_add(1)) < rows.size();) {
            const auto [nf, nc] = cfg.sweep[n];
            const std::string stem = "sweep_" + std::to_string(nf) + "x" + std::to_string(nc);
            try {
                try {
                    const auto res = assim::run_twin(twin_config(cfg, reference, nf, nc));
                    io::write_timeseries(out_path(cfg, stem + ".csv"), res.records);
                    rows[n] = {nf, nc, assim::assess(res.records), false, ""};
                } catch (const assim::TwinFailure& e) {
                    if (e.run() != "assimilated") throw;
                    io::write_timeseries(out_path(cfg, stem + ".csv"), e.records());
                    if (e.last_good())
                        io::write_checkpoint(out_path(cfg, stem + "_last_good.ckpt"), *e.last_good(), config::physical(cfg));
                    rows[n] = {nf, nc, assim::assess(e.records()), true, e.what()};
                    rows[n].verdict.converged = false;
                }
                std::lock_guard lock(log_mutex);
                say(opt.log, "  (" + std::to_string(nf) + ", " + std::to_string(nc) + ") " +
                                 (rows[n].diverged ? "diverged: " + rows[n].failure
                                                   : std::string("converged: ") + (rows[n].verdict.converged ? "yes" : "no")) +
                                 "\n");
            } catch (...) {
                errors[n] = std::current_exception();
            }
        }
    };
    unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, rows.size());
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const std::string path = out_path(cfg, "sweep.csv");
    std::ofstream f(path);
    f << "nf,nc,rate_u,r2_u,rate_theta,r2_theta,rate_omega,r2_omega,converged,status\n" << std::setprecision(17);
    for (const auto& r : rows)
        f << r.nf << "," << r.nc << "," << r.verdict.u.rate << "," << r.verdict.u.r2 << "," << r.verdict.theta.rate
          << "," << r.verdict.theta.r2 << "," << r.verdict.omega.rate << "," << r.verdict.omega.r2 << ","
          << (r.verdict.converged ? "yes" : "no") << ","
          << (r.diverged ? "diverged" : r.verdict.converged ? "converged" : "not_converged") << "\n";
    if (!f) throw io::IoError("write failed: " + path);
    say(opt.log, "verdict table: " + path + "\n");
    return rows;
}

theory::BoundReport cmd_bounds(const RunConfig& in, const Options& opt, std::ostream& os) {
    RunConfig cfg = in;
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    config::validate(cfg);  // no --long gate: nothing is integrated
    const auto report = theory::bound_report(config::bound_inputs(cfg));
    std::ostringstream text;
    theory::write_text(text, report);
    text << "\n";
    theory::write_key_values(text, report);
    os << text.str();
    const std::string path = out_path(cfg, "bounds.txt");
    std::ofstream f(path);
    f << text.str();
    if (!f) throw io::IoError("write failed: " + path);
    return report;
}

std::string cmd_plotdata(const std::string& timeseries, const Options& opt) {
    const auto records = io::read_timeseries(timeseries);
    RunConfig cfg;
    cfg.out_dir = opt.out_dir ? *opt.out_dir : fs::path(timeseries).parent_path().string();
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    const std::string path = out_path(cfg, fs::path(timeseries).stem().string() + ".dat");
    io::write_plotdata(path, records);
    say(opt.log, "wrote " + path + "\n");
    return path;
}

int guarded(const std::function<void()>& f, std::ostream& err) {
    try {
        f();
        return kOk;
    } catch (const config::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const convection::NumericalBlowup& e) {
        err << "numerical blow-up: " << e.what() << "\n";
        return kBlowup;
    } catch (const io::IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kOtherError;
    }
}

}  // namespace bda::app
