#pragma once

#include "bda/field.hpp"

namespace bda::spectral {

// Transforms. All are exact discrete transforms on the collocation grid.
ModalField fourier_forward(const PhysicalField& f);
PhysicalField fourier_inverse(const ModalField& c);
/// Uses c as scratch space.
PhysicalField fourier_inverse(ModalField&& c);
SpectralField chebyshev_forward(const ModalField& c);
ModalField chebyshev_inverse(const SpectralField& c);

SpectralField to_spectral(const PhysicalField& f);
/// Throws std::invalid_argument if the k = 0 or Nyquist rows carry an
/// imaginary part, i.e. the coefficients do not describe a real field.
PhysicalField to_physical(const SpectralField& c);

SpectralField ddx1(const SpectralField& c);
SpectralField ddx2(const SpectralField& c);
SpectralField laplacian(const SpectralField& c);

/// 2/3-rule truncation in x1: zero every |k| > nx1/3. Chebyshev untouched.
SpectralField dealias(SpectralField c);
void dealias_in_place(SpectralField& c);
void dealias_in_place(ModalField& c);

/// Keep |k| <= n_fourier and Chebyshev degrees < n_chebyshev.
/// Throws std::invalid_argument unless 1 <= n_fourier <= nx1/2 and
/// 1 <= n_chebyshev <= nx2.
SpectralField project_low_modes(SpectralField c, int n_fourier, int n_chebyshev);

/// Trapezoid (x1) x Clenshaw-Curtis (x2) approximation of the integral of a*b.
double l2_inner(const PhysicalField& a, const PhysicalField& b);
double l2_norm(const PhysicalField& a);
double integrate(const PhysicalField& a);

/// Point evaluation of the spectral interpolant.
double evaluate(const SpectralField& c, double x1, double x2);

/// Exact integral of the spectral interpolant over [a1, b1] x [a2, b2],
/// divided by the box area.
double box_mean(const SpectralField& c, double a1, double b1, double a2, double b2);

/// Spectral interpolation onto another grid by zero-padding or truncating the
/// coefficient array. Truncation keeps the low modes.
SpectralField resample(const SpectralField& c, const Grid& target);

}  // namespace bda::spectral
