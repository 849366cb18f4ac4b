#pragma once

#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace bda {

/// Allocator handing out 64-byte aligned storage so every field buffer is
/// SIMD-compatible with the FFTW plans created at grid construction.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

namespace detail {
struct FftPlans;
}

/// Tensor collocation grid on [0, L] x [0, 1]: uniform points in x1 (periodic)
/// and Chebyshev-Gauss-Lobatto points in x2, ordered from the bottom wall
/// (x2 = 0) to the top wall (x2 = 1).
///
/// A Grid is a cheap handle onto immutable shared data; copies are equal and
/// safe to use from any thread.
class Grid {
public:
    /// Throws std::invalid_argument unless nx1 is even and >= 8, nx2 >= 9, L > 0.
    Grid(int nx1, int nx2, double length);

    int nx1() const noexcept;
    int nx2() const noexcept;
    double length() const noexcept;

    /// Number of stored Fourier wavenumbers k = 0 .. nx1/2 (the negative half
    /// follows from conjugate symmetry).
    int nmodes() const noexcept { return nx1() / 2 + 1; }
    /// Highest Chebyshev degree, nx2 - 1.
    int degree() const noexcept { return nx2() - 1; }
    std::size_t size() const noexcept { return std::size_t(nx1()) * std::size_t(nx2()); }
    std::size_t modal_size() const noexcept { return std::size_t(nmodes()) * std::size_t(nx2()); }

    std::span<const double> x1() const noexcept;
    std::span<const double> x2() const noexcept;
    /// Trapezoid weights in x1 (all L/nx1).
    std::span<const double> w1() const noexcept;
    /// Clenshaw-Curtis weights on [0, 1].
    std::span<const double> w2() const noexcept;

    /// Angular wavenumber 2 pi k / L.
    double wavenumber(int k) const noexcept;
    /// Largest retained wavenumber index under the 2/3 truncation.
    int dealias_cutoff() const noexcept { return nx1() / 3; }

    bool operator==(const Grid& other) const noexcept;

    const detail::FftPlans& plans() const noexcept;

private:
    struct Data;
    std::shared_ptr<const Data> data_;
};

/// Throws std::invalid_argument when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace bda
