#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bda/elliptic.hpp"
#include "bda/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bda;
using std::numbers::pi;

namespace {

double max_diff(const PhysicalField& a, const PhysicalField& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.data().size(); ++n) m = std::max(m, std::abs(a.data()[n] - b.data()[n]));
    return m;
}

SpectralField random_spectral(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    oracle::SmoothField s(rng, g.length(), g.nx1() / 4);
    return spectral::to_spectral(PhysicalField::sample(g, s));
}

}  // namespace

TEST_SUITE("elliptic") {

TEST_CASE("eigenvalues match the Lagrange-matrix oracle") {
    const Grid g(8, 17, 2.0);
    const elliptic::PoissonSolver ps(g);
    const auto d = oracle::lagrange_d1(std::vector<double>(g.x2().begin(), g.x2().end()));
    const Eigen::MatrixXd d2 = d * d;
    const int m = g.nx2() - 2;
    Eigen::EigenSolver<Eigen::MatrixXd> es(d2.block(1, 1, m, m));
    std::vector<double> ref(m), got(ps.eigenvalues().begin(), ps.eigenvalues().end());
    for (int i = 0; i < m; ++i) ref[i] = es.eigenvalues()[i].real();
    std::sort(ref.begin(), ref.end());
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == ref.size());
    for (int i = 0; i < m; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-9));
    // The smallest ones approximate -(j pi)^2.
    for (int j = 1; j <= 3; ++j) CHECK(got[m - j] == doctest::Approx(-(j * pi) * (j * pi)).epsilon(1e-8));
    for (double l : got) CHECK(l < 0.0);
}

TEST_CASE("manufactured solution on 64x33") {
    const Grid g(64, 33, 2.0);
    const elliptic::PoissonSolver ps(g);
    const double k = 2.0 * pi / g.length();
    const auto psi = PhysicalField::sample(g, [&](double x, double y) { return std::sin(k * x) * std::sin(pi * y); });
    const auto omega = PhysicalField::sample(
        g, [&](double x, double y) { return -(k * k + pi * pi) * std::sin(k * x) * std::sin(pi * y); });
    const auto got = spectral::to_physical(ps.solve(spectral::to_spectral(omega)));
    CHECK(max_diff(got, psi) < 1e-10);
}

TEST_CASE("solution satisfies the collocation equations and the walls") {
    const Grid g(32, 33, 2.0);
    const elliptic::PoissonSolver ps(g);
    const auto w = random_spectral(g, 1);
    const auto psi = ps.solve(w);
    const auto lap = spectral::to_physical(spectral::laplacian(psi));
    const auto wp = spectral::to_physical(w);
    const auto pp = spectral::to_physical(psi);
    double res = 0.0;
    for (int j = 0; j < g.nx1(); ++j) {
        for (int i = 1; i < g.nx2() - 1; ++i) res = std::max(res, std::abs(lap(j, i) - wp(j, i)));
        CHECK(std::abs(pp(j, 0)) < 1e-14);
        CHECK(std::abs(pp(j, g.nx2() - 1)) < 1e-14);
    }
    CHECK(res < 1e-9 * wp.max_abs());
}

TEST_CASE("modal and spectral solves agree") {
    const Grid g(16, 17, 2.0);
    const elliptic::PoissonSolver ps(g);
    const auto w = random_spectral(g, 2);
    const auto a = spectral::to_physical(ps.solve(w));
    const auto b = spectral::fourier_inverse(ps.solve(spectral::chebyshev_inverse(w)));
    CHECK(max_diff(a, b) < 1e-13);
}

TEST_CASE("solve is linear and deterministic") {
    const Grid g(16, 17, 2.0);
    const elliptic::PoissonSolver ps(g);
    const auto a = random_spectral(g, 3), b = random_spectral(g, 4);
    const auto lhs = spectral::to_physical(ps.solve(3.0 * a + b));
    const auto rhs = spectral::to_physical(3.0 * ps.solve(a) + ps.solve(b));
    CHECK(max_diff(lhs, rhs) < 1e-12);
    const auto s1 = ps.solve(a), s2 = ps.solve(a);
    CHECK(std::equal(s1.data().begin(), s1.data().end(), s2.data().begin()));
    CHECK_THROWS_AS(ps.solve(SpectralField(Grid(16, 17, 1.0))), std::invalid_argument);
}

TEST_CASE("velocity of a known streamfunction is divergence free") {
    const Grid g(32, 33, 2.0);
    const double k = 2.0 * pi / g.length();
    const auto psi = spectral::to_spectral(
        PhysicalField::sample(g, [&](double x, double y) { return std::sin(k * x) * y * y * (1 - y) * (1 - y); }));
    const auto u = elliptic::velocity(psi);
    const auto u1 = PhysicalField::sample(
        g, [&](double x, double y) { return -std::sin(k * x) * (2 * y * (1 - y) * (1 - y) - 2 * y * y * (1 - y)); });
    const auto u2 = PhysicalField::sample(g, [&](double x, double y) { return k * std::cos(k * x) * y * y * (1 - y) * (1 - y); });
    CHECK(max_diff(u.u1, u1) < 1e-12);
    CHECK(max_diff(u.u2, u2) < 1e-12);
    const auto div = spectral::to_physical(spectral::ddx1(spectral::to_spectral(u.u1)) +
                                           spectral::ddx2(spectral::to_spectral(u.u2)));
    CHECK(div.max_abs() < 1e-10);
}

TEST_CASE("collocation x2 derivatives agree with the coefficient recurrence") {
    const Grid g(16, 33, 2.0);
    const elliptic::PoissonSolver ps(g);
    const auto c = random_spectral(g, 6);
    const auto m = spectral::chebyshev_inverse(c);
    const auto d1 = spectral::fourier_inverse(ps.dx2(m));
    const auto d2 = spectral::fourier_inverse(ps.dx2x2(m));
    const auto r1 = spectral::to_physical(spectral::ddx2(c));
    const auto r2 = spectral::to_physical(spectral::ddx2(spectral::ddx2(c)));
    CHECK(max_diff(d1, r1) < 1e-10 * std::max(1.0, r1.max_abs()));
    CHECK(max_diff(d2, r2) < 1e-9 * std::max(1.0, r2.max_abs()));
}

}
