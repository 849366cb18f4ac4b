#pragma once

#include <memory>
#include <span>

#include "bda/field.hpp"

namespace bda::elliptic {

/// Solver for  lap(psi) = omega  with psi periodic in x1 and psi = 0 at
/// x2 = 0, 1, by collocation.
///
/// Each Fourier wavenumber k decouples into the 1D problem
/// (D2 - kappa_k^2) psi_k = omega_k at interior Chebyshev points. The interior
/// block of D2 is diagonalized once, D2 = V diag(lambda) V^-1, so that each
/// solve is two dense products plus a diagonal scaling for all k at once.
class PoissonSolver {
public:
    explicit PoissonSolver(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }

    /// Only the interior rows of omega enter; the wall rows of psi are zero.
    SpectralField solve(const SpectralField& omega) const;
    ModalField solve(const ModalField& omega) const;

    /// Collocation derivatives in x2 of a mixed-representation field: the exact
    /// derivatives of each mode's Chebyshev interpolant at the grid points.
    ModalField dx2(const ModalField& f) const;
    ModalField dx2x2(const ModalField& f) const;

    /// Eigenvalues of the interior Dirichlet block of d^2/dx2^2 (k = 0 operator),
    /// in the order used by the diagonalization.
    std::span<const double> eigenvalues() const noexcept;

private:
    struct Impl;
    Grid grid_;
    std::shared_ptr<const Impl> impl_;
};

struct Velocity {
    PhysicalField u1;
    PhysicalField u2;
};

/// u = perp-grad psi = (-d psi/dx2, d psi/dx1).
Velocity velocity(const SpectralField& psi);

}  // namespace bda::elliptic
