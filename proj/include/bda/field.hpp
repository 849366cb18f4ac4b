#pragma once

#include <complex>
#include <span>

#include "bda/grid.hpp"

namespace bda {

using Complex = std::complex<double>;

namespace detail {

// Shared storage and vector-space arithmetic for the three field kinds.
template <class Derived, class T>
class FieldBase {
public:
    using value_type = T;

    const Grid& grid() const noexcept { return grid_; }
    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    Derived& operator+=(const Derived& o) {
        require_same_grid(grid_, o.grid_, "field +=");
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
        return self();
    }
    Derived& operator-=(const Derived& o) {
        require_same_grid(grid_, o.grid_, "field -=");
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
        return self();
    }
    Derived& operator*=(double a) {
        for (auto& v : data_) v *= a;
        return self();
    }
    /// this += a * x
    Derived& axpy(double a, const Derived& x) {
        require_same_grid(grid_, x.grid_, "field axpy");
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += a * x.data_[n];
        return self();
    }

    friend Derived operator+(Derived a, const Derived& b) { return a += b; }
    friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
    friend Derived operator*(double s, Derived a) { return a *= s; }
    friend Derived operator*(Derived a, double s) { return a *= s; }

protected:
    FieldBase(Grid g, std::size_t n) : grid_(std::move(g)), data_(n, T{}) {}

    Grid grid_;
    AlignedVector<T> data_;

private:
    Derived& self() { return static_cast<Derived&>(*this); }
};

}  // namespace detail

/// Values at the collocation points; entry (j, i) sits at (x1_j, x2_i) and x2
/// varies fastest in memory.
class PhysicalField : public detail::FieldBase<PhysicalField, double> {
public:
    explicit PhysicalField(Grid g) : FieldBase(g, g.size()) {}

    template <class F>
    static PhysicalField sample(const Grid& g, F&& f) {
        PhysicalField out(g);
        const auto x1 = g.x1();
        const auto x2 = g.x2();
        for (int j = 0; j < g.nx1(); ++j)
            for (int i = 0; i < g.nx2(); ++i) out(j, i) = f(x1[j], x2[i]);
        return out;
    }

    double& operator()(int j, int i) noexcept { return data_[std::size_t(j) * grid_.nx2() + i]; }
    double operator()(int j, int i) const noexcept { return data_[std::size_t(j) * grid_.nx2() + i]; }

    /// Overwrite the whole x2 = x2_i row.
    void set_row(int i, double value) noexcept {
        for (int j = 0; j < grid_.nx1(); ++j) (*this)(j, i) = value;
    }
    double max_abs() const noexcept;
    bool all_finite() const noexcept;
};

/// Mixed representation: Fourier coefficients in x1 (k = 0 .. nx1/2) and
/// collocation values in x2. This is the space in which the per-wavenumber
/// wall-normal problems are solved.
class ModalField : public detail::FieldBase<ModalField, Complex> {
public:
    explicit ModalField(Grid g) : FieldBase(g, g.modal_size()) {}

    Complex& operator()(int k, int i) noexcept { return data_[std::size_t(k) * grid_.nx2() + i]; }
    Complex operator()(int k, int i) const noexcept { return data_[std::size_t(k) * grid_.nx2() + i]; }
};

/// Fourier x Chebyshev coefficients. Stores wavenumbers k = 0 .. nx1/2; the
/// coefficient for -k is the conjugate of the one for k (real fields only).
///
/// Normalization: the k = 0 row is the x1-mean, and in x2 the field is
/// sum_n a_n T_n(2 x2 - 1) with the Gauss-Lobatto cosine transform that halves
/// the first and last terms.
class SpectralField : public detail::FieldBase<SpectralField, Complex> {
public:
    explicit SpectralField(Grid g) : FieldBase(g, g.modal_size()) {}

    Complex& operator()(int k, int n) noexcept { return data_[std::size_t(k) * grid_.nx2() + n]; }
    Complex operator()(int k, int n) const noexcept { return data_[std::size_t(k) * grid_.nx2() + n]; }

    /// Coefficient for a signed wavenumber, -nx1/2 < k <= nx1/2.
    Complex coeff(int k, int n) const;
};

}  // namespace bda
