#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bda/convection.hpp"
#include "bda/io.hpp"

namespace bda::assim {

/// Orthogonal projection onto |k| <= n_fourier, Chebyshev degree < n_chebyshev.
struct SpectralProjection {
    int n_fourier = 0;
    int n_chebyshev = 0;
};

/// Averages over boxes_x1 x boxes_x2 equal boxes tiling [0, L] x [0, 1].
struct LocalAverage {
    int boxes_x1 = 0;
    int boxes_x2 = 0;
};

using InterpolantSpec = std::variant<SpectralProjection, LocalAverage>;

/// Throws std::invalid_argument if the interpolant does not fit the grid.
void validate(const InterpolantSpec& spec, const Grid& grid);

/// Observation length scale h: 1/min(nF, nC) for the projection (the largest
/// ball |k| <= 1/h inside the retained index set), the largest box side for
/// local averages.
double resolution(const InterpolantSpec& spec, double length);

std::string describe(const InterpolantSpec& spec);

struct NudgeParams {
    double mu = 1.0;
    InterpolantSpec interpolant;
};

struct Box {
    double a1, b1, a2, b2;
    double area() const noexcept { return (b1 - a1) * (b2 - a2); }
};

/// Box (j1, j2) of the tiling, j1 along x1.
Box tile(const LocalAverage& spec, int j1, int j2, double length);

/// Box means used by the local-average interpolant: quadrature-weighted means
/// over the collocation points owned by each box. A point belongs to the box
/// whose half-open range [a, b) contains it (the top row to the last box).
/// Entry j1 * boxes_x2 + j2.
std::vector<double> box_averages(const LocalAverage& spec, const PhysicalField& omega);

/// I_h(omega). Projection: project_low_modes. Local average: the
/// piecewise-constant field holding each box mean, in spectral form.
SpectralField interpolate(const InterpolantSpec& spec, const SpectralField& omega);

/// (1/|Q|) times the counter-clockwise line integral of u around the box,
/// using Gauss-Legendre quadrature on each edge and spectral interpolation of
/// u. Throws std::invalid_argument for degenerate boxes or boxes outside the
/// domain.
double local_circulation(const PhysicalField& u1, const PhysicalField& u2, const Box& box);

/// I_h precomputed for one grid, acting on x1-transformed fields. The
/// Chebyshev truncation is applied as a dense collocation matrix, so results
/// agree with interpolate() up to round-off.
class Interpolant {
public:
    Interpolant(const InterpolantSpec& spec, const Grid& grid);

    const InterpolantSpec& spec() const noexcept;
    const Grid& grid() const noexcept;
    ModalField apply(const ModalField& omega) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// -mu (I_h(omega_da) - observed), 2/3-truncated in x1.
SpectralField nudging_term(const SpectralField& omega_da, const SpectralField& observed, const NudgeParams& np);
ModalField nudging_term(const ModalField& omega_da, const ModalField& observed, double mu, const Interpolant& ip);

/// Tendency of the assimilating system: the reference tendency plus the
/// nudging term on the vorticity equation only.
convection::Tendency nudged_rhs(const convection::FieldPair& s, const SpectralField& observed,
                                const NudgeParams& np, const convection::PhysParams& pp,
                                const elliptic::PoissonSolver& ps);
/// Same, with the observation in mixed representation and I_h precomputed.
convection::Tendency nudged_rhs(const convection::FieldPair& s, const ModalField& observed, double mu,
                                const Interpolant& ip, const convection::PhysParams& pp,
                                const elliptic::PoissonSolver& ps);

struct TwinConfig {
    convection::PhysParams params;
    NudgeParams nudge;
    convection::State reference;
    /// Defaults to omega = 0, theta = 1 - x2 on the reference grid.
    std::optional<convection::State> assimilated;
    double t_final = 1.0;
    double sample_dt = 0.1;
    convection::StepControl step;
    std::string reference_checkpoint_out;  // empty: not written
    std::string assimilated_checkpoint_out;
};

struct TwinResult {
    std::vector<io::TwinRecord> records;
    convection::State reference;
    convection::State assimilated;
    double dt = 0.0;
    long steps = 0;
};

/// Names the run ("reference" or "assimilated") that blew up; last_good()
/// holds that run's state at the start of the failed step when known.
class TwinFailure : public convection::NumericalBlowup {
public:
    TwinFailure(std::string run, std::string detail)
        : NumericalBlowup(run + " run: " + detail), run_(std::move(run)), detail_(std::move(detail)) {}
    TwinFailure(std::string run, std::string detail, convection::State last_good)
        : NumericalBlowup(run + " run: " + detail, std::move(last_good)),
          run_(std::move(run)),
          detail_(std::move(detail)) {}
    const std::string& run() const noexcept { return run_; }
    const std::string& detail() const noexcept { return detail_; }
    /// Error samples recorded before the failure.
    const std::vector<io::TwinRecord>& records() const noexcept { return records_; }
    void set_records(std::vector<io::TwinRecord> r) { records_ = std::move(r); }

private:
    std::string run_;
    std::string detail_;
    std::vector<io::TwinRecord> records_;
};

/// Advance the reference and the assimilating system in lockstep with one
/// shared dt, feeding I_h of the reference vorticity into every RK stage.
TwinResult run_twin(const TwinConfig& cfg);

struct ChannelVerdict {
    double rate = 0.0;
    double r2 = 0.0;
    double ratio = 1.0;  // final / initial error
    bool fit_ok = false;
    bool converged = false;
};

struct Verdict {
    ChannelVerdict u, theta, omega;
    bool converged = false;  // all three channels
};

inline constexpr double kConvergedR2 = 0.98;
inline constexpr double kConvergedRatio = 1e-6;

/// Convergence: fitted rate over the second half negative with r2 >= 0.98,
/// and final error below 1e-6 times the initial error.
Verdict assess(const std::vector<io::TwinRecord>& records);

}  // namespace bda::assim
