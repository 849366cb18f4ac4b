#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bda/elliptic.hpp"
#include "bda/rk4.hpp"
#include "bda/spectral.hpp"

namespace bda::convection {

/// Ra, Pr and the aspect length; nu = sqrt(Pr/Ra), kappa = 1/sqrt(Pr Ra).
class PhysParams {
public:
    PhysParams(double ra, double pr, double length);

    double ra() const noexcept { return ra_; }
    double pr() const noexcept { return pr_; }
    double length() const noexcept { return length_; }
    double nu() const noexcept { return nu_; }
    double kappa() const noexcept { return kappa_; }

private:
    double ra_, pr_, length_, nu_, kappa_;
};

/// Vorticity and temperature at the collocation points.
struct FieldPair {
    PhysicalField omega;
    PhysicalField theta;

    FieldPair& operator+=(const FieldPair& o) {
        omega += o.omega;
        theta += o.theta;
        return *this;
    }
    FieldPair& operator*=(double a) {
        omega *= a;
        theta *= a;
        return *this;
    }
    friend FieldPair operator+(FieldPair a, const FieldPair& b) { return a += b; }
    friend FieldPair operator*(double s, FieldPair a) { return a *= s; }
};

using Tendency = FieldPair;

/// Flow state. The wall rows of omega hold the closure value computed from
/// the interior; theta is pinned to 1 at x2 = 0 and 0 at x2 = 1.
struct State : FieldPair {
    double t = 0.0;

    State(FieldPair f, double time) : FieldPair(std::move(f)), t(time) {}
    const Grid& grid() const noexcept { return omega.grid(); }
};

/// Raised when a tendency or stage value stops being finite. Carries the last
/// state known to be good when the failure happened inside a time step.
class NumericalBlowup : public std::runtime_error {
public:
    explicit NumericalBlowup(const std::string& what) : std::runtime_error(what) {}
    NumericalBlowup(const std::string& what, State last_good)
        : std::runtime_error(what), last_good_(std::move(last_good)) {}
    const std::optional<State>& last_good() const noexcept { return last_good_; }

private:
    std::optional<State> last_good_;
};

/// omega = 0, theta = 1 - x2, t = 0.
State conduction_state(const Grid& grid);

/// Conduction state plus a seeded, band-limited temperature perturbation that
/// vanishes at both walls. Deterministic in the seed; linear in amplitude.
State random_perturbed_ic(const Grid& grid, std::uint64_t seed, double amplitude);

/// Number of interior points in the one-sided wall-vorticity stencil.
inline constexpr int kWallStencil = 4;

/// Weights w_j (j = 1..kWallStencil) such that omega_wall = sum_j w_j psi_j,
/// where psi_j is the value at the j-th point away from the wall. Built from
/// the quintic through psi = dpsi/dx2 = 0 at the wall and the interior points,
/// so the formula is fourth order in the wall spacing.
std::vector<double> wall_vorticity_weights(const Grid& grid);

struct WallRows {
    std::vector<double> bottom;
    std::vector<double> top;
};

/// Wall vorticity implied by psi and the no-slip condition dpsi/dx2 = 0.
WallRows wall_vorticity(const SpectralField& psi);

/// Overwrite the wall rows of omega with the closure computed from psi.
void apply_wall_vorticity(const ModalField& psi, ModalField& omega);

/// Recompute omega's wall rows from its interior.
void complete_wall_vorticity(FieldPair& s, const elliptic::PoissonSolver& ps);

/// Tendency of the reference system,
///   d omega/dt = nu lap(omega) - u.grad(omega) + d theta/dx1
///   d theta/dt = kappa lap(theta) - u.grad(theta)
/// The buoyancy sign follows from curling u_t + ... = theta e2 with
/// omega = lap(psi) and u = (-dpsi/dx2, dpsi/dx1). If completed_vorticity is given it
/// receives the x1-transformed vorticity with the wall closure applied, i.e.
/// the field the observation operator acts on.
Tendency rhs(const FieldPair& s, const PhysParams& pp, const elliptic::PoissonSolver& ps,
             ModalField* completed_vorticity = nullptr);

/// RK4 step with theta re-pinned at the walls and t advanced.
template <class F>
State rk4_step(const State& s, double dt, F&& f) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    FieldPair next = [&] {
        try {
            return rk4(static_cast<const FieldPair&>(s), dt, f);
        } catch (const NumericalBlowup& e) {
            throw NumericalBlowup(e.what(), s);
        }
    }();
    const int top = s.grid().nx2() - 1;
    next.theta.set_row(0, 1.0);
    next.theta.set_row(top, 0.0);
    if (!next.omega.all_finite() || !next.theta.all_finite())
        throw NumericalBlowup("non-finite state after RK4 update at t = " + std::to_string(s.t + dt), s);
    return State(std::move(next), s.t + dt);
}

/// One step of the reference system; omega's wall rows are refreshed after.
State step(const State& s, double dt, const PhysParams& pp, const elliptic::PoissonSolver& ps);

/// cfl * min(advective limit, diffusive limit) with pointwise advective limit
/// min(dx1/|u1|, dx2_local/|u2|) and diffusive limit
/// min(dx1^2, dx2_min^2) / (4 max(nu, kappa)).
double stable_dt(const State& s, const PhysParams& pp, const elliptic::PoissonSolver& ps, double cfl);

/// 1 + sqrt(Pr Ra) * volume average of u2 * theta.
double nusselt_instant(const FieldPair& s, const PhysParams& pp, const elliptic::PoissonSolver& ps);

/// Fixed time step with optional shrink-only re-evaluation.
struct StepControl {
    double cfl = 0.5;
    double fixed_dt = 0.0;  // > 0 disables the stability estimate
    int recheck_interval = 50;
};

class TimeStepper {
public:
    TimeStepper(const StepControl& control, const State& initial, const PhysParams& pp,
                const elliptic::PoissonSolver& ps);
    double dt() const noexcept { return dt_; }
    /// Called after each step; may shrink dt.
    void observe(const State& s, const PhysParams& pp, const elliptic::PoissonSolver& ps);

private:
    StepControl control_;
    double dt_;
    long steps_ = 0;
};

struct SpinUpOptions {
    double window = 5.0;      // time units per averaging window
    double tolerance = 0.01;  // relative change of windowed Nu
    double max_time = 200.0;
    double sample_dt = 0.1;
    StepControl step;
};

struct SpinUpResult {
    State state;
    std::vector<double> times;
    std::vector<double> nusselt;
    bool converged = false;
};

/// Integrate until the Nu average over the last window differs from the one
/// over the window before it by less than tolerance (relative), or until
/// max_time has elapsed.
SpinUpResult spin_up(State s, const PhysParams& pp, const elliptic::PoissonSolver& ps, const SpinUpOptions& opt);

/// Spectral interpolation of a state onto another grid (walls re-imposed).
State resample(const State& s, const Grid& target, const elliptic::PoissonSolver& target_solver);

}  // namespace bda::convection
