#include "bda/assim.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bda::assim {

using convection::FieldPair;
using convection::State;
using convection::Tendency;

void validate(const InterpolantSpec& spec, const Grid& grid) {
    if (const auto* p = std::get_if<SpectralProjection>(&spec)) {
        if (p->n_fourier < 1 || p->n_fourier > grid.nx1() / 2)
            throw std::invalid_argument("spectral projection: nF must be in [1, nx1/2]");
        if (p->n_chebyshev < 1 || p->n_chebyshev > grid.nx2())
            throw std::invalid_argument("spectral projection: nC must be in [1, nx2]");
    } else {
        const auto& a = std::get<LocalAverage>(spec);
        if (a.boxes_x1 < 1 || a.boxes_x2 < 1) throw std::invalid_argument("local average: box counts must be >= 1");
        if (a.boxes_x1 > grid.nx1() || a.boxes_x2 > grid.nx2() - 1)
            throw std::invalid_argument("local average: more boxes than grid cells");
    }
}

double resolution(const InterpolantSpec& spec, double length) {
    if (const auto* p = std::get_if<SpectralProjection>(&spec))
        return 1.0 / std::min(p->n_fourier, p->n_chebyshev);
    const auto& a = std::get<LocalAverage>(spec);
    return std::max(length / a.boxes_x1, 1.0 / a.boxes_x2);
}

std::string describe(const InterpolantSpec& spec) {
    std::ostringstream os;
    if (const auto* p = std::get_if<SpectralProjection>(&spec))
        os << "spectral_projection(" << p->n_fourier << "," << p->n_chebyshev << ")";
    else
        os << "local_average(" << std::get<LocalAverage>(spec).boxes_x1 << ","
           << std::get<LocalAverage>(spec).boxes_x2 << ")";
    return os.str();
}

Box tile(const LocalAverage& spec, int j1, int j2, double length) {
    const double w1 = length / spec.boxes_x1;
    const double w2 = 1.0 / spec.boxes_x2;
    return {j1 * w1, j1 == spec.boxes_x1 - 1 ? length : (j1 + 1) * w1, j2 * w2,
            j2 == spec.boxes_x2 - 1 ? 1.0 : (j2 + 1) * w2};
}

namespace {

// Owning box index along x2 for each collocation row.
std::vector<int> x2_owner(const Grid& g, int boxes) {
    std::vector<int> owner(g.nx2());
    const auto x2 = g.x2();
    for (int i = 0; i < g.nx2(); ++i)
        owner[i] = std::min(boxes - 1, int(std::floor(x2[i] * boxes + 1e-9)));
    return owner;
}

}  // namespace

std::vector<double> box_averages(const LocalAverage& spec, const PhysicalField& omega) {
    const Grid& g = omega.grid();
    validate(spec, g);
    const auto own2 = x2_owner(g, spec.boxes_x2);
    const auto w2 = g.w2();
    const std::size_t nb = std::size_t(spec.boxes_x1) * spec.boxes_x2;
    std::vector<double> sum(nb, 0.0), weight(nb, 0.0);
    for (int j = 0; j < g.nx1(); ++j) {
        const int b1 = int((long(j) * spec.boxes_x1) / g.nx1());
        for (int i = 0; i < g.nx2(); ++i) {
            const std::size_t b = std::size_t(b1) * spec.boxes_x2 + own2[i];
            sum[b] += w2[i] * omega(j, i);
            weight[b] += w2[i];
        }
    }
    for (std::size_t b = 0; b < nb; ++b) sum[b] /= weight[b];
    return sum;
}

SpectralField interpolate(const InterpolantSpec& spec, const SpectralField& omega) {
    const Grid& g = omega.grid();
    validate(spec, g);
    if (const auto* p = std::get_if<SpectralProjection>(&spec))
        return spectral::project_low_modes(omega, p->n_fourier, p->n_chebyshev);

    const auto& a = std::get<LocalAverage>(spec);
    const auto means = box_averages(a, spectral::to_physical(omega));
    const auto own2 = x2_owner(g, a.boxes_x2);
    PhysicalField pc(g);
    for (int j = 0; j < g.nx1(); ++j) {
        const int b1 = int((long(j) * a.boxes_x1) / g.nx1());
        for (int i = 0; i < g.nx2(); ++i) pc(j, i) = means[std::size_t(b1) * a.boxes_x2 + own2[i]];
    }
    return spectral::to_spectral(pc);
}

namespace {

struct GaussLegendre {
    std::vector<double> x, w;  // on [-1, 1]
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre q{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * z * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        q.x[i] = z;
        q.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return q;
}

// Integral of the interpolant of c along the straight segment p -> q.
double line_integral(const SpectralField& c, const GaussLegendre& gl, double p1, double p2, double q1, double q2) {
    const double len = std::hypot(q1 - p1, q2 - p2);
    double sum = 0.0;
    for (std::size_t n = 0; n < gl.x.size(); ++n) {
        const double s = 0.5 * (gl.x[n] + 1.0);
        sum += gl.w[n] * spectral::evaluate(c, p1 + s * (q1 - p1), p2 + s * (q2 - p2));
    }
    return 0.5 * len * sum;
}

}  // namespace

double local_circulation(const PhysicalField& u1, const PhysicalField& u2, const Box& box) {
    require_same_grid(u1.grid(), u2.grid(), "local_circulation");
    const Grid& g = u1.grid();
    if (!(box.b1 > box.a1) || !(box.b2 > box.a2)) throw std::invalid_argument("local_circulation: degenerate box");
    if (box.a1 < 0.0 || box.b1 > g.length() || box.a2 < 0.0 || box.b2 > 1.0)
        throw std::invalid_argument("local_circulation: box outside the domain");

    const SpectralField c1 = spectral::to_spectral(u1);
    const SpectralField c2 = spectral::to_spectral(u2);
    const auto gl = gauss_legendre(g.nx1() + g.nx2());
    // Counter-clockwise: bottom (+u1), right (+u2), top (-u1), left (-u2).
    const double circ = line_integral(c1, gl, box.a1, box.a2, box.b1, box.a2) +
                        line_integral(c2, gl, box.b1, box.a2, box.b1, box.b2) -
                        line_integral(c1, gl, box.a1, box.b2, box.b1, box.b2) -
                        line_integral(c2, gl, box.a1, box.a2, box.a1, box.b2);
    return circ / box.area();
}

struct Interpolant::Impl {
    InterpolantSpec spec;
    Grid grid;
    Eigen::MatrixXd chebyshev_filter;  // projection only
    std::vector<int> owner_x2;         // local average only
};

Interpolant::Interpolant(const InterpolantSpec& spec, const Grid& grid) {
    validate(spec, grid);
    auto impl = std::make_shared<Impl>(Impl{spec, grid, {}, {}});
    if (const auto* p = std::get_if<SpectralProjection>(&spec)) {
        // f_i = sum_n a_n T_n(xi_i) and its inverse, from the cosine-sum
        // form of the Gauss-Lobatto transform.
        const int n = grid.degree();
        const int np = n + 1;
        Eigen::MatrixXd synth(np, p->n_chebyshev), anal(p->n_chebyshev, np);
        for (int i = 0; i < np; ++i) {
            for (int m = 0; m < p->n_chebyshev; ++m) {
                const double t = ((m % 2) ? -1.0 : 1.0) * std::cos(std::numbers::pi * double(m) * i / n);
                const double end_i = (i == 0 || i == n) ? 1.0 : 2.0;
                const double end_m = (m == 0 || m == n) ? 2.0 : 1.0;
                synth(i, m) = t;
                anal(m, i) = end_i * t / (n * end_m);
            }
        }
        impl->chebyshev_filter = synth * anal;
    } else {
        impl->owner_x2 = x2_owner(grid, std::get<LocalAverage>(spec).boxes_x2);
    }
    impl_ = std::move(impl);
}

const InterpolantSpec& Interpolant::spec() const noexcept { return impl_->spec; }
const Grid& Interpolant::grid() const noexcept { return impl_->grid; }

ModalField Interpolant::apply(const ModalField& omega) const {
    const Grid& g = impl_->grid;
    require_same_grid(g, omega.grid(), "Interpolant::apply");
    if (const auto* p = std::get_if<SpectralProjection>(&impl_->spec)) {
        ModalField out(g);
        using Map = Eigen::Map<Eigen::MatrixXcd>;
        using ConstMap = Eigen::Map<const Eigen::MatrixXcd>;
        const int cols = p->n_fourier + 1;
        Map(out.data().data(), g.nx2(), cols).noalias() =
            impl_->chebyshev_filter * ConstMap(omega.data().data(), g.nx2(), cols);
        // The Nyquist mode is kept only when it is inside |k| <= nF, as a cosine.
        if (p->n_fourier == g.nx1() / 2)
            for (int i = 0; i < g.nx2(); ++i) out(p->n_fourier, i) = out(p->n_fourier, i).real();
        return out;
    }
    const auto& a = std::get<LocalAverage>(impl_->spec);
    const auto means = box_averages(a, spectral::fourier_inverse(omega));
    PhysicalField pc(g);
    for (int j = 0; j < g.nx1(); ++j) {
        const int b1 = int((long(j) * a.boxes_x1) / g.nx1());
        for (int i = 0; i < g.nx2(); ++i) pc(j, i) = means[std::size_t(b1) * a.boxes_x2 + impl_->owner_x2[i]];
    }
    return spectral::fourier_forward(pc);
}

SpectralField nudging_term(const SpectralField& omega_da, const SpectralField& observed, const NudgeParams& np) {
    SpectralField term = interpolate(np.interpolant, omega_da);
    term -= observed;
    term *= -np.mu;
    spectral::dealias_in_place(term);
    return term;
}

ModalField nudging_term(const ModalField& omega_da, const ModalField& observed, double mu, const Interpolant& ip) {
    ModalField term = ip.apply(omega_da);
    term -= observed;
    term *= -mu;
    spectral::dealias_in_place(term);
    return term;
}

namespace {

void check_mu(double mu) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("nudged_rhs: mu must be finite and >= 0");
}

}  // namespace

Tendency nudged_rhs(const FieldPair& s, const ModalField& observed, double mu, const Interpolant& ip,
                    const convection::PhysParams& pp, const elliptic::PoissonSolver& ps) {
    check_mu(mu);
    ModalField completed(s.omega.grid());
    Tendency out = convection::rhs(s, pp, ps, &completed);
    if (mu == 0.0) return out;

    const PhysicalField add = spectral::fourier_inverse(nudging_term(completed, observed, mu, ip));
    const Grid& g = s.omega.grid();
    for (int j = 0; j < g.nx1(); ++j)
        for (int i = 1; i + 1 < g.nx2(); ++i) out.omega(j, i) += add(j, i);
    return out;
}

Tendency nudged_rhs(const FieldPair& s, const SpectralField& observed, const NudgeParams& np,
                    const convection::PhysParams& pp, const elliptic::PoissonSolver& ps) {
    check_mu(np.mu);
    const Interpolant ip(np.interpolant, s.omega.grid());
    return nudged_rhs(s, spectral::chebyshev_inverse(observed), np.mu, ip, pp, ps);
}

namespace {

struct Pair {
    FieldPair ref;
    FieldPair da;

    Pair& operator+=(const Pair& o) {
        ref += o.ref;
        da += o.da;
        return *this;
    }
    Pair& operator*=(double a) {
        ref *= a;
        da *= a;
        return *this;
    }
    friend Pair operator+(Pair a, const Pair& b) { return a += b; }
    friend Pair operator*(double s, Pair a) { return a *= s; }
};

}  // namespace

TwinResult run_twin(const TwinConfig& cfg) {
    const Grid& g = cfg.reference.grid();
    validate(cfg.nudge.interpolant, g);
    if (!(cfg.t_final > 0.0) || !(cfg.sample_dt > 0.0)) throw std::invalid_argument("run_twin: bad time settings");
    const elliptic::PoissonSolver ps(g);
    const Interpolant ip(cfg.nudge.interpolant, g);
    const auto& pp = cfg.params;

    State ref = cfg.reference;
    State da = cfg.assimilated ? *cfg.assimilated : convection::conduction_state(g);
    require_same_grid(g, da.grid(), "run_twin");
    da.t = ref.t;
    convection::complete_wall_vorticity(ref, ps);
    convection::complete_wall_vorticity(da, ps);

    auto guarded = [&](const Pair& y) -> Pair {
        ModalField wref(g);
        Tendency tr = [&] {
            try {
                return convection::rhs(y.ref, pp, ps, &wref);
            } catch (const convection::NumericalBlowup& e) {
                throw TwinFailure("reference", e.what());
            }
        }();
        try {
            const ModalField observed = cfg.nudge.mu > 0.0 ? ip.apply(wref) : ModalField(g);
            Tendency td = nudged_rhs(y.da, observed, cfg.nudge.mu, ip, pp, ps);
            return Pair{std::move(tr), std::move(td)};
        } catch (const convection::NumericalBlowup& e) {
            throw TwinFailure("assimilated", e.what());
        }
    };

    double dt = cfg.step.fixed_dt;
    if (!(dt > 0.0)) dt = std::min(convection::stable_dt(ref, pp, ps, cfg.step.cfl), convection::stable_dt(da, pp, ps, cfg.step.cfl));

    TwinResult res{{}, ref, da, dt, 0};
    auto record = [&](const State& r, const State& a) {
        const auto e = io::error_norms(r, a, ps);
        res.records.push_back({r.t, e.u, e.theta, e.omega, convection::nusselt_instant(r, pp, ps),
                               convection::nusselt_instant(a, pp, ps)});
    };
    record(ref, da);

    const double t0 = ref.t;
    long since_check = 0;
    try {
        double next_sample = t0 + cfg.sample_dt;
        const int top = g.nx2() - 1;
        auto finite = [](const FieldPair& f) { return f.omega.all_finite() && f.theta.all_finite(); };
        while (ref.t - t0 < cfg.t_final - 0.5 * dt) {
            Pair next = [&] {
                try {
                    return rk4(Pair{ref, da}, dt, guarded);
                } catch (const TwinFailure& e) {
                    throw TwinFailure(e.run(), e.detail(), e.run() == "reference" ? ref : da);
                }
            }();
            const double t = ref.t + dt;
            if (!finite(next.ref)) throw TwinFailure("reference", "non-finite state at t = " + std::to_string(t), ref);
            if (!finite(next.da)) throw TwinFailure("assimilated", "non-finite state at t = " + std::to_string(t), da);
            for (auto* f : {&next.ref.theta, &next.da.theta}) {
                f->set_row(0, 1.0);
                f->set_row(top, 0.0);
            }
            ref = State(std::move(next.ref), t);
            da = State(std::move(next.da), t);
            convection::complete_wall_vorticity(ref, ps);
            convection::complete_wall_vorticity(da, ps);
            ++res.steps;

            if (!(cfg.step.fixed_dt > 0.0) && cfg.step.recheck_interval > 0 && ++since_check == cfg.step.recheck_interval) {
                since_check = 0;
                dt = std::min({dt, convection::stable_dt(ref, pp, ps, cfg.step.cfl),
                               convection::stable_dt(da, pp, ps, cfg.step.cfl)});
            }
            if (t + 0.5 * dt >= next_sample) {
                record(ref, da);
                next_sample += cfg.sample_dt;
            }
        }
    } catch (TwinFailure& e) {
        e.set_records(std::move(res.records));
        throw;
    }
    res.reference = ref;
    res.assimilated = da;
    res.dt = dt;
    if (!cfg.reference_checkpoint_out.empty()) io::write_checkpoint(cfg.reference_checkpoint_out, ref, pp);
    if (!cfg.assimilated_checkpoint_out.empty()) io::write_checkpoint(cfg.assimilated_checkpoint_out, da, pp);
    return res;
}

namespace {

ChannelVerdict judge(const std::vector<double>& t, const std::vector<double>& e) {
    ChannelVerdict v;
    if (e.empty()) return v;
    v.ratio = e.front() > 0.0 ? e.back() / e.front() : 0.0;
    try {
        const auto fit = io::fit_second_half(t, e);
        v.rate = fit.rate;
        v.r2 = fit.r2;
        v.fit_ok = true;
    } catch (const std::invalid_argument&) {
        v.fit_ok = false;
    }
    v.converged = v.fit_ok && v.rate < 0.0 && v.r2 >= kConvergedR2 && v.ratio < kConvergedRatio;
    return v;
}

}  // namespace

Verdict assess(const std::vector<io::TwinRecord>& records) {
    std::vector<double> t, eu, et, ew;
    for (const auto& r : records) {
        t.push_back(r.t);
        eu.push_back(r.err_u);
        et.push_back(r.err_theta);
        ew.push_back(r.err_omega);
    }
    Verdict v{judge(t, eu), judge(t, et), judge(t, ew), false};
    v.converged = v.u.converged && v.theta.converged && v.omega.converged;
    return v;
}

}  // namespace bda::assim
