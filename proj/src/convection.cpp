#include "bda/convection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace bda::convection {

using elliptic::PoissonSolver;
using spectral::chebyshev_forward;
using spectral::chebyshev_inverse;
using spectral::ddx1;
using spectral::ddx2;

PhysParams::PhysParams(double ra, double pr, double length) : ra_(ra), pr_(pr), length_(length) {
    if (!(ra > 0.0) || !std::isfinite(ra)) throw std::invalid_argument("Ra must be positive");
    if (!(pr > 0.0) || !std::isfinite(pr)) throw std::invalid_argument("Pr must be positive");
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("L must be positive");
    nu_ = std::sqrt(pr / ra);
    kappa_ = 1.0 / std::sqrt(pr * ra);
}

State conduction_state(const Grid& grid) {
    PhysicalField theta = PhysicalField::sample(grid, [](double, double x2) { return 1.0 - x2; });
    return State({PhysicalField(grid), std::move(theta)}, 0.0);
}

State random_perturbed_ic(const Grid& grid, std::uint64_t seed, double amplitude) {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("random_perturbed_ic: amplitude must be >= 0");
    State s = conduction_state(grid);
    const int kmax = std::min(4, grid.dealias_cutoff());
    const int mmax = std::min(4, grid.nx2() / 3);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> a(kmax * mmax), b(kmax * mmax);
    for (int n = 0; n < kmax * mmax; ++n) {
        a[n] = coef(rng);
        b[n] = coef(rng);
    }
    const double norm = amplitude / std::sqrt(double(kmax * mmax));
    const auto x1 = grid.x1();
    const auto x2 = grid.x2();
    for (int j = 0; j < grid.nx1(); ++j) {
        for (int i = 1; i + 1 < grid.nx2(); ++i) {
            double p = 0.0;
            for (int k = 1; k <= kmax; ++k) {
                const double ph = grid.wavenumber(k) * x1[j];
                for (int m = 1; m <= mmax; ++m) {
                    const int n = (k - 1) * mmax + (m - 1);
                    p += (a[n] * std::cos(ph) + b[n] * std::sin(ph)) * std::sin(std::numbers::pi * m * x2[i]);
                }
            }
            s.theta(j, i) += norm * p;
        }
    }
    return s;
}

std::vector<double> wall_vorticity_weights(const Grid& grid) {
    const auto x2 = grid.x2();
    std::vector<double> w(kWallStencil);
    for (int j = 0; j < kWallStencil; ++j) {
        const double hj = x2[j + 1];
        double lagrange_at_wall = 1.0;
        for (int m = 0; m < kWallStencil; ++m) {
            if (m == j) continue;
            const double hm = x2[m + 1];
            lagrange_at_wall *= hm / (hm - hj);
        }
        w[j] = 2.0 * lagrange_at_wall / (hj * hj);
    }
    return w;
}

namespace {

// Per-grid wall weights, cached for the hot path.
const std::vector<double>& cached_weights(const Grid& grid) {
    thread_local Grid last(grid);
    thread_local std::vector<double> weights = wall_vorticity_weights(grid);
    if (!(last == grid)) {
        last = grid;
        weights = wall_vorticity_weights(grid);
    }
    return weights;
}

}  // namespace

void apply_wall_vorticity(const ModalField& psi, ModalField& omega) {
    require_same_grid(psi.grid(), omega.grid(), "apply_wall_vorticity");
    const Grid& g = psi.grid();
    const auto& w = cached_weights(g);
    const int top = g.nx2() - 1;
    for (int k = 0; k < g.nmodes(); ++k) {
        Complex bottom{}, upper{};
        for (int j = 0; j < kWallStencil; ++j) {
            bottom += w[j] * psi(k, j + 1);
            upper += w[j] * psi(k, top - j - 1);
        }
        omega(k, 0) = bottom;
        omega(k, top) = upper;
    }
}

WallRows wall_vorticity(const SpectralField& psi) {
    const Grid& g = psi.grid();
    ModalField omega(g);
    apply_wall_vorticity(chebyshev_inverse(psi), omega);
    const PhysicalField rows = spectral::fourier_inverse(omega);
    WallRows out{std::vector<double>(g.nx1()), std::vector<double>(g.nx1())};
    for (int j = 0; j < g.nx1(); ++j) {
        out.bottom[j] = rows(j, 0);
        out.top[j] = rows(j, g.nx2() - 1);
    }
    return out;
}

void complete_wall_vorticity(FieldPair& s, const PoissonSolver& ps) {
    const Grid& g = s.omega.grid();
    ModalField om = spectral::fourier_forward(s.omega);
    apply_wall_vorticity(ps.solve(om), om);
    const PhysicalField walls = spectral::fourier_inverse(std::move(om));
    const int top = g.nx2() - 1;
    for (int j = 0; j < g.nx1(); ++j) {
        s.omega(j, 0) = walls(j, 0);
        s.omega(j, top) = walls(j, top);
    }
}

namespace {

// i kappa_k f, Nyquist row zeroed.
ModalField modal_ddx1(const ModalField& f) {
    const Grid& g = f.grid();
    ModalField out(g);
    const int nyquist = g.nx1() / 2;
    for (int k = 0; k < nyquist; ++k) {
        const Complex ik(0.0, g.wavenumber(k));
        for (int i = 0; i < g.nx2(); ++i) out(k, i) = ik * f(k, i);
    }
    return out;
}

}  // namespace

Tendency rhs(const FieldPair& s, const PhysParams& pp, const PoissonSolver& ps, ModalField* completed_vorticity) {
    const Grid& g = s.omega.grid();
    require_same_grid(g, ps.grid(), "rhs");
    require_same_grid(g, s.theta.grid(), "rhs");

    ModalField om = spectral::fourier_forward(s.omega);
    const ModalField th = spectral::fourier_forward(s.theta);
    const ModalField psi = ps.solve(om);
    apply_wall_vorticity(psi, om);

    const ModalField th_x = modal_ddx1(th);
    const PhysicalField u1 = spectral::fourier_inverse(ps.dx2(psi));  // -u1; sign folded in below
    const PhysicalField u2 = spectral::fourier_inverse(modal_ddx1(psi));
    const PhysicalField wx = spectral::fourier_inverse(modal_ddx1(om));
    const PhysicalField wy = spectral::fourier_inverse(ps.dx2(om));
    const PhysicalField tx = spectral::fourier_inverse(th_x);
    const PhysicalField ty = spectral::fourier_inverse(ps.dx2(th));

    PhysicalField adv_w(g), adv_t(g);
    {
        auto a = adv_w.data();
        auto b = adv_t.data();
        const auto v1 = u1.data(), v2 = u2.data();
        const auto p = wx.data(), q = wy.data(), r = tx.data(), z = ty.data();
        for (std::size_t n = 0; n < a.size(); ++n) {
            a[n] = -v1[n] * p[n] + v2[n] * q[n];
            b[n] = -v1[n] * r[n] + v2[n] * z[n];
        }
    }
    ModalField nw = spectral::fourier_forward(adv_w);
    ModalField nt = spectral::fourier_forward(adv_t);
    spectral::dealias_in_place(nw);
    spectral::dealias_in_place(nt);

    ModalField dw = ps.dx2x2(om);
    ModalField dth = ps.dx2x2(th);
    for (int k = 0; k < g.nmodes(); ++k) {
        const double kk = g.wavenumber(k) * g.wavenumber(k);
        for (int i = 0; i < g.nx2(); ++i) {
            dw(k, i) = pp.nu() * (dw(k, i) - kk * om(k, i)) + th_x(k, i) - nw(k, i);
            dth(k, i) = pp.kappa() * (dth(k, i) - kk * th(k, i)) - nt(k, i);
        }
    }

    Tendency out{spectral::fourier_inverse(std::move(dw)), spectral::fourier_inverse(std::move(dth))};
    if (!out.omega.all_finite() || !out.theta.all_finite()) throw NumericalBlowup("non-finite tendency");
    const int top = g.nx2() - 1;
    for (auto* f : {&out.omega, &out.theta}) {
        f->set_row(0, 0.0);
        f->set_row(top, 0.0);
    }
    if (completed_vorticity) *completed_vorticity = std::move(om);
    return out;
}

State step(const State& s, double dt, const PhysParams& pp, const PoissonSolver& ps) {
    State next = rk4_step(s, dt, [&](const FieldPair& y) { return rhs(y, pp, ps); });
    complete_wall_vorticity(next, ps);
    return next;
}

double stable_dt(const State& s, const PhysParams& pp, const PoissonSolver& ps, double cfl) {
    if (!(cfl > 0.0) || cfl > 1.0) throw std::invalid_argument("stable_dt: cfl must be in (0, 1]");
    const Grid& g = s.grid();
    const auto x2 = g.x2();
    const int top = g.nx2() - 1;
    const double dx1 = g.length() / g.nx1();
    const double dx2_min = x2[1] - x2[0];
    const double diffusive = std::min(dx1 * dx1, dx2_min * dx2_min) / (4.0 * std::max(pp.nu(), pp.kappa()));

    const auto u = elliptic::velocity(ps.solve(spectral::to_spectral(s.omega)));
    double advective = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= top; ++i) {
        double dx2 = i == 0 ? x2[1] - x2[0] : x2[i] - x2[i - 1];
        if (i > 0 && i < top) dx2 = std::min(dx2, x2[i + 1] - x2[i]);
        for (int j = 0; j < g.nx1(); ++j) {
            const double a1 = std::abs(u.u1(j, i));
            const double a2 = std::abs(u.u2(j, i));
            if (a1 > 0.0) advective = std::min(advective, dx1 / a1);
            if (a2 > 0.0) advective = std::min(advective, dx2 / a2);
        }
    }
    return cfl * std::min(advective, diffusive);
}

double nusselt_instant(const FieldPair& s, const PhysParams& pp, const PoissonSolver& ps) {
    const Grid& g = s.omega.grid();
    const SpectralField psi = ps.solve(spectral::to_spectral(s.omega));
    const PhysicalField u2 = spectral::to_physical(ddx1(psi));
    const double mean = spectral::l2_inner(u2, s.theta) / g.length();
    return 1.0 + std::sqrt(pp.pr() * pp.ra()) * mean;
}

TimeStepper::TimeStepper(const StepControl& control, const State& initial, const PhysParams& pp,
                         const PoissonSolver& ps)
    : control_(control),
      dt_(control.fixed_dt > 0.0 ? control.fixed_dt : stable_dt(initial, pp, ps, control.cfl)) {}

void TimeStepper::observe(const State& s, const PhysParams& pp, const PoissonSolver& ps) {
    ++steps_;
    if (control_.fixed_dt > 0.0 || control_.recheck_interval <= 0) return;
    if (steps_ % control_.recheck_interval == 0) dt_ = std::min(dt_, stable_dt(s, pp, ps, control_.cfl));
}

namespace {

double window_mean(const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t n = 0; n < t.size(); ++n) {
        if (t[n] > lo && t[n] <= hi) {
            sum += v[n];
            ++count;
        }
    }
    return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SpinUpResult spin_up(State s, const PhysParams& pp, const PoissonSolver& ps, const SpinUpOptions& opt) {
    if (!(opt.window > 0.0) || !(opt.sample_dt > 0.0)) throw std::invalid_argument("spin_up: bad options");
    TimeStepper stepper(opt.step, s, pp, ps);
    SpinUpResult out{s, {}, {}, false};
    const double t0 = s.t;
    out.times.push_back(s.t);
    out.nusselt.push_back(nusselt_instant(s, pp, ps));
    double next_sample = t0 + opt.sample_dt;

    while (s.t - t0 < opt.max_time) {
        s = step(s, stepper.dt(), pp, ps);
        stepper.observe(s, pp, ps);
        if (s.t + 0.5 * stepper.dt() < next_sample) continue;
        next_sample += opt.sample_dt;
        out.times.push_back(s.t);
        out.nusselt.push_back(nusselt_instant(s, pp, ps));
        if (s.t - t0 < 2.0 * opt.window) continue;
        const double recent = window_mean(out.times, out.nusselt, s.t - opt.window, s.t);
        const double before = window_mean(out.times, out.nusselt, s.t - 2.0 * opt.window, s.t - opt.window);
        if (std::abs(recent - before) < opt.tolerance * std::abs(before)) {
            out.converged = true;
            break;
        }
    }
    out.state = std::move(s);
    return out;
}

State resample(const State& s, const Grid& target, const PoissonSolver& target_solver) {
    auto move = [&](const PhysicalField& f) {
        SpectralField c = spectral::resample(spectral::to_spectral(f), target);
        spectral::dealias_in_place(c);
        return spectral::to_physical(c);
    };
    State out({move(s.omega), move(s.theta)}, s.t);
    out.theta.set_row(0, 1.0);
    out.theta.set_row(target.nx2() - 1, 0.0);
    complete_wall_vorticity(out, target_solver);
    return out;
}

}  // namespace bda::convection
