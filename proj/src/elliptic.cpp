#include "bda/elliptic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bda/spectral.hpp"

namespace bda::elliptic {

namespace {

// Chebyshev collocation first-derivative matrix on the Gauss-Lobatto points
// ordered from xi = -1 to xi = 1.
Eigen::MatrixXd chebyshev_d1(int n) {
    const int np = n + 1;
    Eigen::VectorXd x(np), c(np);
    for (int i = 0; i < np; ++i) {
        x[i] = -std::cos(std::numbers::pi * i / n);
        c[i] = (i == 0 || i == n) ? 2.0 : 1.0;
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(np, np);
    for (int i = 0; i < np; ++i) {
        double row = 0.0;
        for (int j = 0; j < np; ++j) {
            if (i == j) continue;
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            d(i, j) = (c[i] / c[j]) * sign / (x[i] - x[j]);
            row += d(i, j);
        }
        d(i, i) = -row;
    }
    return d;
}

}  // namespace

struct PoissonSolver::Impl {
    Eigen::MatrixXd d1, d2;   // full collocation derivatives on [0, 1]
    int interior;
    int nk;
    Eigen::MatrixXd vec;      // V
    Eigen::MatrixXd vec_inv;  // V^-1
    std::vector<double> lambda;
    Eigen::MatrixXd scale;  // 1 / (lambda_i - kappa_k^2)
};

PoissonSolver::PoissonSolver(const Grid& grid) : grid_(grid) {
    const int n = grid.degree();
    const int m = n - 1;
    if (m < 3) throw std::invalid_argument("PoissonSolver: grid too small");

    // d/dx2 = 2 d/dxi on [0, 1].
    const Eigen::MatrixXd d1 = 2.0 * chebyshev_d1(n);
    const Eigen::MatrixXd d2 = d1 * d1;
    const Eigen::MatrixXd a = d2.block(1, 1, m, m);

    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw std::runtime_error("PoissonSolver: eigen-decomposition failed");

    auto impl = std::make_shared<Impl>();
    impl->d1 = d1;
    impl->d2 = d2;
    impl->interior = m;
    impl->nk = grid.nmodes();
    impl->lambda.resize(m);
    const double lam_scale = es.eigenvalues().cwiseAbs().maxCoeff();
    for (int i = 0; i < m; ++i) {
        if (std::abs(es.eigenvalues()[i].imag()) > 1e-8 * lam_scale)
            throw std::runtime_error("PoissonSolver: complex eigenvalue in Dirichlet operator");
        impl->lambda[i] = es.eigenvalues()[i].real();
    }
    impl->vec = es.eigenvectors().real();
    impl->vec_inv = impl->vec.partialPivLu().inverse();

    const int nk = impl->nk;
    impl->scale.resize(m, nk);
    for (int k = 0; k < nk; ++k) {
        const double kk = grid.wavenumber(k) * grid.wavenumber(k);
        for (int i = 0; i < m; ++i) impl->scale(i, k) = 1.0 / (impl->lambda[i] - kk);
    }
    impl_ = std::move(impl);
}

std::span<const double> PoissonSolver::eigenvalues() const noexcept { return impl_->lambda; }

ModalField PoissonSolver::solve(const ModalField& omega) const {
    require_same_grid(grid_, omega.grid(), "PoissonSolver::solve");
    const int m = impl_->interior;
    const int nk = impl_->nk;
    const int nx2 = grid_.nx2();

    using Interior = Eigen::Map<Eigen::MatrixXcd, 0, Eigen::OuterStride<>>;
    using ConstInterior = Eigen::Map<const Eigen::MatrixXcd, 0, Eigen::OuterStride<>>;
    Eigen::MatrixXcd z = impl_->vec_inv * ConstInterior(omega.data().data() + 1, m, nk, Eigen::OuterStride<>(nx2));
    for (int k = 0; k < nk; ++k)
        for (int i = 0; i < m; ++i) z(i, k) *= impl_->scale(i, k);

    ModalField psi(grid_);
    Interior(psi.data().data() + 1, m, nk, Eigen::OuterStride<>(nx2)).noalias() = impl_->vec * z;
    return psi;
}

namespace {

using ModalMap = Eigen::Map<Eigen::MatrixXcd>;
using ConstModalMap = Eigen::Map<const Eigen::MatrixXcd>;

// Columns are wavenumbers, rows the x2 collocation points.
ModalField apply_x2(const Eigen::MatrixXd& m, const ModalField& f) {
    const Grid& g = f.grid();
    ModalField out(g);
    ModalMap(out.data().data(), g.nx2(), g.nmodes()).noalias() =
        m * ConstModalMap(f.data().data(), g.nx2(), g.nmodes());
    return out;
}

}  // namespace

ModalField PoissonSolver::dx2(const ModalField& f) const {
    require_same_grid(grid_, f.grid(), "PoissonSolver::dx2");
    return apply_x2(impl_->d1, f);
}

ModalField PoissonSolver::dx2x2(const ModalField& f) const {
    require_same_grid(grid_, f.grid(), "PoissonSolver::dx2x2");
    return apply_x2(impl_->d2, f);
}

SpectralField PoissonSolver::solve(const SpectralField& omega) const {
    return spectral::chebyshev_forward(solve(spectral::chebyshev_inverse(omega)));
}

Velocity velocity(const SpectralField& psi) {
    PhysicalField u1 = spectral::to_physical(spectral::ddx2(psi));
    u1 *= -1.0;
    return {std::move(u1), spectral::to_physical(spectral::ddx1(psi))};
}

}  // namespace bda::elliptic
