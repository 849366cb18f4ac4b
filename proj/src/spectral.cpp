#include "bda/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft_plans.hpp"

namespace bda {

double PhysicalField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool PhysicalField::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Complex SpectralField::coeff(int k, int n) const {
    const int half = grid_.nx1() / 2;
    if (k <= -half || k > half || n < 0 || n >= grid_.nx2())
        throw std::out_of_range("spectral coefficient index");
    return k >= 0 ? (*this)(k, n) : std::conj((*this)(-k, n));
}

namespace spectral {

namespace {

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
double* as_real(Complex* p) { return reinterpret_cast<double*>(p); }

}  // namespace

ModalField fourier_forward(const PhysicalField& f) {
    const Grid& g = f.grid();
    ModalField out(g);
    // Out-of-place r2c leaves its input untouched.
    fftw_execute_dft_r2c(g.plans().r2c, const_cast<double*>(f.data().data()), as_fftw(out.data().data()));
    out *= 1.0 / g.nx1();
    return out;
}

PhysicalField fourier_inverse(ModalField&& c) {
    const Grid& g = c.grid();
    PhysicalField out(g);
    fftw_execute_dft_c2r(g.plans().c2r, as_fftw(c.data().data()), out.data().data());
    return out;
}

PhysicalField fourier_inverse(const ModalField& c) { return fourier_inverse(ModalField(c)); }

SpectralField chebyshev_forward(const ModalField& c) {
    const Grid& g = c.grid();
    SpectralField out(g);
    std::copy(c.data().begin(), c.data().end(), out.data().begin());
    double* p = as_real(out.data().data());
    fftw_execute_r2r(g.plans().dct, p, p);
    const int n = g.degree();
    for (int k = 0; k < g.nmodes(); ++k) {
        for (int m = 0; m <= n; ++m) {
            double s = (m % 2 == 0 ? 1.0 : -1.0) / n;
            if (m == 0 || m == n) s *= 0.5;
            out(k, m) *= s;
        }
    }
    return out;
}

ModalField chebyshev_inverse(const SpectralField& c) {
    const Grid& g = c.grid();
    ModalField out(g);
    const int n = g.degree();
    for (int k = 0; k < g.nmodes(); ++k) {
        for (int m = 0; m <= n; ++m) {
            double s = (m % 2 == 0 ? 0.5 : -0.5);
            if (m == 0 || m == n) s *= 2.0;
            out(k, m) = s * c(k, m);
        }
    }
    double* p = as_real(out.data().data());
    fftw_execute_r2r(g.plans().dct, p, p);
    return out;
}

SpectralField to_spectral(const PhysicalField& f) { return chebyshev_forward(fourier_forward(f)); }

PhysicalField to_physical(const SpectralField& c) {
    const Grid& g = c.grid();
    double scale = 0.0;
    for (const auto& v : c.data()) scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * std::max(scale, 1e-300);
    const int nyq = g.nx1() / 2;
    for (int n = 0; n < g.nx2(); ++n) {
        if (std::abs(c(0, n).imag()) > tol || std::abs(c(nyq, n).imag()) > tol)
            throw std::invalid_argument("to_physical: coefficients are not conjugate-symmetric");
    }
    return fourier_inverse(chebyshev_inverse(c));
}

SpectralField ddx1(const SpectralField& c) {
    const Grid& g = c.grid();
    SpectralField out(g);
    const int nyq = g.nx1() / 2;
    for (int k = 0; k < nyq; ++k) {
        const Complex factor(0.0, g.wavenumber(k));
        for (int n = 0; n < g.nx2(); ++n) out(k, n) = factor * c(k, n);
    }
    return out;
}

SpectralField ddx2(const SpectralField& c) {
    const Grid& g = c.grid();
    SpectralField out(g);
    const int n = g.degree();
    for (int k = 0; k < g.nmodes(); ++k) {
        // Backward recurrence for the derivative in xi on [-1, 1]; the factor 2
        // maps d/dxi to d/dx2.
        Complex next2{}, next1{};
        for (int m = n; m >= 1; --m) {
            const Complex b = next2 + 2.0 * m * c(k, m);
            out(k, m - 1) = b;
            next2 = next1;
            next1 = b;
        }
        out(k, 0) *= 0.5;
        out(k, n) = 0.0;
        for (int m = 0; m < n; ++m) out(k, m) *= 2.0;
    }
    return out;
}

SpectralField laplacian(const SpectralField& c) {
    SpectralField out = ddx2(ddx2(c));
    const Grid& g = c.grid();
    for (int k = 1; k < g.nmodes(); ++k) {
        const double kk = g.wavenumber(k) * g.wavenumber(k);
        for (int n = 0; n < g.nx2(); ++n) out(k, n) -= kk * c(k, n);
    }
    return out;
}

namespace {
template <class F>
void zero_above_cutoff(F& c) {
    const Grid& g = c.grid();
    for (int k = g.dealias_cutoff() + 1; k < g.nmodes(); ++k)
        for (int n = 0; n < g.nx2(); ++n) c(k, n) = 0.0;
}
}  // namespace

void dealias_in_place(SpectralField& c) { zero_above_cutoff(c); }
void dealias_in_place(ModalField& c) { zero_above_cutoff(c); }

SpectralField dealias(SpectralField c) {
    zero_above_cutoff(c);
    return c;
}

SpectralField project_low_modes(SpectralField c, int n_fourier, int n_chebyshev) {
    const Grid& g = c.grid();
    if (n_fourier < 1 || n_fourier > g.nx1() / 2)
        throw std::invalid_argument("project_low_modes: n_fourier out of range: " + std::to_string(n_fourier));
    if (n_chebyshev < 1 || n_chebyshev > g.nx2())
        throw std::invalid_argument("project_low_modes: n_chebyshev out of range: " + std::to_string(n_chebyshev));
    for (int k = 0; k < g.nmodes(); ++k)
        for (int n = 0; n < g.nx2(); ++n)
            if (k > n_fourier || n >= n_chebyshev) c(k, n) = 0.0;
    return c;
}

double l2_inner(const PhysicalField& a, const PhysicalField& b) {
    require_same_grid(a.grid(), b.grid(), "l2_inner");
    const Grid& g = a.grid();
    const auto w2 = g.w2();
    double total = 0.0;
    for (int j = 0; j < g.nx1(); ++j) {
        double col = 0.0;
        for (int i = 0; i < g.nx2(); ++i) col += w2[i] * a(j, i) * b(j, i);
        total += col;
    }
    return total * g.w1()[0];
}

double l2_norm(const PhysicalField& a) { return std::sqrt(l2_inner(a, a)); }

double integrate(const PhysicalField& a) {
    const Grid& g = a.grid();
    const auto w2 = g.w2();
    double total = 0.0;
    for (int j = 0; j < g.nx1(); ++j)
        for (int i = 0; i < g.nx2(); ++i) total += w2[i] * a(j, i);
    return total * g.w1()[0];
}

namespace {

// sum_n c(k, n) T_n(xi) for every stored k.
std::vector<Complex> chebyshev_rows(const SpectralField& c, double xi) {
    const Grid& g = c.grid();
    std::vector<Complex> rows(g.nmodes(), Complex{});
    double tm1 = 1.0, t = xi;
    std::vector<double> tn(g.nx2());
    tn[0] = 1.0;
    if (g.nx2() > 1) tn[1] = xi;
    for (int n = 2; n < g.nx2(); ++n) {
        const double tp = 2.0 * xi * t - tm1;
        tm1 = t;
        t = tp;
        tn[n] = tp;
    }
    for (int k = 0; k < g.nmodes(); ++k)
        for (int n = 0; n < g.nx2(); ++n) rows[k] += c(k, n) * tn[n];
    return rows;
}

// Real trigonometric interpolant; the Nyquist row contributes a cosine.
template <class Basis>
double fourier_sum(const Grid& g, const std::vector<Complex>& rows, Basis&& basis) {
    const int nyq = g.nx1() / 2;
    double value = rows[0].real() * basis(0).real();
    for (int k = 1; k < nyq; ++k) value += 2.0 * (rows[k] * basis(k)).real();
    value += rows[nyq].real() * basis(nyq).real();
    return value;
}

// Antiderivative in xi of T_n.
double chebyshev_antiderivative(int n, double xi) {
    if (n == 0) return xi;
    if (n == 1) return 0.5 * xi * xi;
    const double theta = std::acos(std::clamp(xi, -1.0, 1.0));
    return std::cos((n + 1) * theta) / (2.0 * (n + 1)) - std::cos((n - 1) * theta) / (2.0 * (n - 1));
}

}  // namespace

double evaluate(const SpectralField& c, double x1, double x2) {
    const Grid& g = c.grid();
    const auto rows = chebyshev_rows(c, 2.0 * x2 - 1.0);
    return fourier_sum(g, rows, [&](int k) {
        const double phase = g.wavenumber(k) * x1;
        return Complex(std::cos(phase), std::sin(phase));
    });
}

double box_mean(const SpectralField& c, double a1, double b1, double a2, double b2) {
    const Grid& g = c.grid();
    if (!(b1 > a1) || !(b2 > a2)) throw std::invalid_argument("box_mean: degenerate box");
    const double xa = 2.0 * a2 - 1.0;
    const double xb = 2.0 * b2 - 1.0;
    std::vector<Complex> rows(g.nmodes(), Complex{});
    for (int n = 0; n < g.nx2(); ++n) {
        const double w = 0.5 * (chebyshev_antiderivative(n, xb) - chebyshev_antiderivative(n, xa));
        for (int k = 0; k < g.nmodes(); ++k) rows[k] += c(k, n) * w;
    }
    const int nyq = g.nx1() / 2;
    const double integral = fourier_sum(g, rows, [&](int k) -> Complex {
        if (k == 0) return {b1 - a1, 0.0};
        const double kap = g.wavenumber(k);
        if (k == nyq) return {(std::sin(kap * b1) - std::sin(kap * a1)) / kap, 0.0};
        // int e^{i kap x} dx = (e^{i kap b} - e^{i kap a}) / (i kap)
        const Complex eb(std::cos(kap * b1), std::sin(kap * b1));
        const Complex ea(std::cos(kap * a1), std::sin(kap * a1));
        return (eb - ea) / Complex(0.0, kap);
    });
    return integral / ((b1 - a1) * (b2 - a2));
}

SpectralField resample(const SpectralField& c, const Grid& target) {
    const Grid& g = c.grid();
    if (target.length() != g.length()) throw std::invalid_argument("resample: domain length differs");
    SpectralField out(target);
    const int src_nyq = g.nx1() / 2;
    const int tgt_nyq = target.nx1() / 2;
    const int kmax = std::min(src_nyq, tgt_nyq - 1);
    const int nmax = std::min(g.nx2(), target.nx2());
    for (int k = 0; k <= kmax; ++k) {
        // The source Nyquist row is a bare cosine; as an interior row it is split
        // between +k and -k.
        const double s = (k == src_nyq && k > 0) ? 0.5 : 1.0;
        for (int n = 0; n < nmax; ++n) out(k, n) = s * c(k, n);
    }
    return out;
}

}  // namespace spectral
}  // namespace bda
