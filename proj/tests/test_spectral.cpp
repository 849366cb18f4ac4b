#include <cmath>
#include <numbers>
#include <random>

#include "bda/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bda;
using std::numbers::pi;

namespace {

PhysicalField random_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    PhysicalField f(g);
    for (auto& v : f.data()) v = n(rng);
    return f;
}

double max_diff(const PhysicalField& a, const PhysicalField& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.data().size(); ++n) m = std::max(m, std::abs(a.data()[n] - b.data()[n]));
    return m;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid rejects bad shapes") {
    CHECK_THROWS_AS(Grid(7, 9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(6, 9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(8, 8, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(8, 9, 0.0), std::invalid_argument);
    CHECK_NOTHROW(Grid(8, 9, 2.0));
}

TEST_CASE("grid nodes and weights") {
    const Grid g(16, 17, 2.0);
    const auto x2 = g.x2();
    CHECK(x2.front() == 0.0);
    CHECK(x2.back() == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 1; i < g.nx2(); ++i) CHECK(x2[i] > x2[i - 1]);
    double s = 0.0;
    for (double w : g.w2()) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    // Clenshaw-Curtis integrates x^15 exactly on 17 points.
    double m = 0.0;
    for (int i = 0; i < g.nx2(); ++i) m += g.w2()[i] * std::pow(x2[i], 15);
    CHECK(std::abs(m - 1.0 / 16.0) < 1e-14);
    CHECK(g.wavenumber(3) == doctest::Approx(3.0 * pi));
}

TEST_CASE("forward transform matches direct summation oracle") {
    const Grid g(8, 9, 2.0);
    const auto f = random_field(g, 11);
    const auto c = spectral::to_spectral(f);
    const auto ref = oracle::forward(f);
    double err = 0.0;
    for (int k = 0; k < g.nmodes(); ++k)
        for (int n = 0; n < g.nx2(); ++n) err = std::max(err, std::abs(c(k, n) - ref[k][n]));
    CHECK(err < 1e-12);
}

TEST_CASE("round trip is exact to round-off") {
    for (auto [nx1, nx2] : {std::pair{8, 9}, {64, 33}, {128, 65}}) {
        const Grid g(nx1, nx2, 2.0);
        const auto f = random_field(g, 5);
        CHECK(max_diff(spectral::to_physical(spectral::to_spectral(f)), f) < 1e-12);
    }
}

TEST_CASE("signed coefficient access uses conjugate symmetry") {
    const Grid g(8, 9, 2.0);
    const auto c = spectral::to_spectral(random_field(g, 3));
    CHECK(c.coeff(-2, 3) == std::conj(c(2, 3)));
    CHECK(c.coeff(4, 0) == c(4, 0));
    CHECK_THROWS_AS(c.coeff(-4, 0), std::out_of_range);
    CHECK_THROWS_AS(c.coeff(0, 9), std::out_of_range);
}

TEST_CASE("to_physical rejects non-real coefficients") {
    const Grid g(8, 9, 2.0);
    SpectralField c(g);
    c(0, 2) = Complex(0.0, 1.0);
    CHECK_THROWS_AS(spectral::to_physical(c), std::invalid_argument);
}

TEST_CASE("derivatives of a smooth field") {
    const Grid g(32, 33, 2.0);
    const double k = 2.0 * pi * 3.0 / g.length();
    const auto f = PhysicalField::sample(g, [&](double x, double y) { return std::sin(k * x) * std::exp(y); });
    const auto fx = PhysicalField::sample(g, [&](double x, double y) { return k * std::cos(k * x) * std::exp(y); });
    const auto fy = f;
    const auto lap = PhysicalField::sample(g, [&](double x, double y) { return (1.0 - k * k) * std::sin(k * x) * std::exp(y); });
    const auto c = spectral::to_spectral(f);
    CHECK(max_diff(spectral::to_physical(spectral::ddx1(c)), fx) < 1e-11);
    CHECK(max_diff(spectral::to_physical(spectral::ddx2(c)), fy) < 1e-11);
    CHECK(max_diff(spectral::to_physical(spectral::laplacian(c)), lap) < 1e-9);
}

TEST_CASE("ddx2 against Lagrange differentiation on the nodes") {
    const Grid g(8, 17, 1.0);
    const auto f = random_field(g, 9);
    const auto d = oracle::lagrange_d1(std::vector<double>(g.x2().begin(), g.x2().end()));
    const auto got = spectral::to_physical(spectral::ddx2(spectral::to_spectral(f)));
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < g.nx1(); ++j)
        for (int i = 0; i < g.nx2(); ++i) {
            double s = 0.0;
            for (int m = 0; m < g.nx2(); ++m) s += d(i, m) * f(j, m);
            err = std::max(err, std::abs(s - got(j, i)));
            scale = std::max(scale, std::abs(s));
        }
    CHECK(err < 1e-11 * scale);
}

TEST_CASE("ddx1 zeroes the Nyquist mode") {
    const Grid g(8, 9, 2.0);
    const auto f = PhysicalField::sample(g, [&](double x, double) { return std::cos(g.wavenumber(4) * x); });
    CHECK(spectral::to_physical(spectral::ddx1(spectral::to_spectral(f))).max_abs() < 1e-14);
}

TEST_CASE("dealiasing removes the sum mode of a product") {
    const Grid g(16, 9, 2.0);
    CHECK(g.dealias_cutoff() == 5);
    const double k1 = g.wavenumber(1), k3 = g.wavenumber(3), k4 = g.wavenumber(4);
    const auto p = PhysicalField::sample(g, [&](double x, double) { return std::cos(k4 * x) * std::cos(k3 * x); });
    const auto expect = PhysicalField::sample(g, [&](double x, double) { return 0.5 * std::cos(k1 * x); });
    const auto d = spectral::to_physical(spectral::dealias(spectral::to_spectral(p)));
    CHECK(max_diff(d, expect) < 1e-14);
}

TEST_CASE("dealias keeps |k| <= nx1/3 and is idempotent") {
    const Grid g(24, 9, 1.0);
    const auto c = spectral::to_spectral(random_field(g, 2));
    const auto d = spectral::dealias(c);
    for (int k = 0; k < g.nmodes(); ++k)
        for (int n = 0; n < g.nx2(); ++n) {
            if (k <= 8)
                CHECK(d(k, n) == c(k, n));
            else
                CHECK(d(k, n) == Complex{});
        }
    const auto dd = spectral::dealias(d);
    CHECK(std::equal(dd.data().begin(), dd.data().end(), d.data().begin()));
}

TEST_CASE("project_low_modes keeps the documented index set") {
    const Grid g(192, 96, 2.0);
    const auto c = spectral::project_low_modes(spectral::to_spectral(random_field(g, 4)), 6, 8);
    int stored = 0;
    for (const auto& v : c.data()) stored += v != Complex{};
    CHECK(stored == 7 * 8);
    CHECK_THROWS_AS(spectral::project_low_modes(c, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(spectral::project_low_modes(c, 97, 8), std::invalid_argument);
    CHECK_THROWS_AS(spectral::project_low_modes(c, 6, 0), std::invalid_argument);
    CHECK_THROWS_AS(spectral::project_low_modes(c, 6, 97), std::invalid_argument);
}

TEST_CASE("projection is linear and idempotent") {
    const Grid g(32, 17, 2.0);
    const auto a = spectral::to_spectral(random_field(g, 1));
    const auto b = spectral::to_spectral(random_field(g, 2));
    const auto lhs = spectral::project_low_modes(2.0 * a + b, 5, 4);
    const auto rhs = 2.0 * spectral::project_low_modes(a, 5, 4) + spectral::project_low_modes(b, 5, 4);
    double err = 0.0;
    for (std::size_t n = 0; n < lhs.data().size(); ++n) err = std::max(err, std::abs(lhs.data()[n] - rhs.data()[n]));
    CHECK(err < 1e-14);
    const auto p2 = spectral::project_low_modes(lhs, 5, 4);
    CHECK(std::equal(p2.data().begin(), p2.data().end(), lhs.data().begin()));
}

TEST_CASE("l2_inner against adaptive Simpson") {
    const Grid g(32, 33, 2.0);
    auto fa = [](double x, double y) { return std::cos(pi * x) * y * (1.0 - y) + 0.3 * std::exp(y); };
    auto fb = [](double x, double y) { return std::sin(2.0 * pi * x) + std::cos(pi * x) * std::sin(3.0 * y) + 1.0; };
    const double got = spectral::l2_inner(PhysicalField::sample(g, fa), PhysicalField::sample(g, fb));
    const double ref = oracle::simpson(
        [&](double x) { return oracle::simpson([&](double y) { return fa(x, y) * fb(x, y); }, 0.0, 1.0, 1e-13); },
        0.0, 2.0, 1e-12);
    CHECK(std::abs(got - ref) < 1e-10);
}

TEST_CASE("Parseval in x1") {
    const Grid g(16, 9, 2.0);
    std::mt19937_64 rng(8);
    oracle::SmoothField s(rng, g.length(), 7);
    const auto f = PhysicalField::sample(g, [&](double x, double) { return s(x, 0.3); });
    const auto m = spectral::fourier_forward(f);
    double e = 0.0;
    for (int k = 0; k < g.nmodes(); ++k) {
        const double w = (k == 0 || k == g.nx1() / 2) ? 1.0 : 2.0;
        e += w * std::norm(m(k, 0));
    }
    double direct = 0.0;
    for (int j = 0; j < g.nx1(); ++j) direct += f(j, 0) * f(j, 0);
    CHECK(e * g.length() == doctest::Approx(direct * g.w1()[0]).epsilon(1e-13));
}

TEST_CASE("integrate and norm of known fields") {
    const Grid g(16, 17, 2.0);
    const auto one = PhysicalField::sample(g, [](double, double) { return 1.0; });
    CHECK(spectral::integrate(one) == doctest::Approx(2.0).epsilon(1e-14));
    const auto f = PhysicalField::sample(g, [](double x, double y) { return std::sin(pi * x) * y; });
    CHECK(spectral::l2_norm(f) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));
}

TEST_CASE("evaluate reproduces a band-limited polynomial off grid") {
    const Grid g(16, 17, 2.0);
    auto fn = [&](double x, double y) { return std::cos(g.wavenumber(2) * x + 0.3) * (y * y * y - y) + y; };
    const auto c = spectral::to_spectral(PhysicalField::sample(g, fn));
    for (auto [x, y] : {std::pair{0.123, 0.456}, {1.77, 0.999}, {0.0, 0.0}})
        CHECK(std::abs(spectral::evaluate(c, x, y) - fn(x, y)) < 1e-13);
}

TEST_CASE("box_mean matches the analytic integral") {
    const Grid g(16, 17, 2.0);
    const double k = g.wavenumber(1);
    auto fn = [&](double x, double y) { return std::cos(k * x) * y * y + 2.0; };
    const auto c = spectral::to_spectral(PhysicalField::sample(g, fn));
    const double a1 = 0.2, b1 = 0.9, a2 = 0.25, b2 = 0.7;
    const double ix = (std::sin(k * b1) - std::sin(k * a1)) / k;
    const double iy = (b2 * b2 * b2 - a2 * a2 * a2) / 3.0;
    const double expect = (ix * iy + 2.0 * (b1 - a1) * (b2 - a2)) / ((b1 - a1) * (b2 - a2));
    CHECK(std::abs(spectral::box_mean(c, a1, b1, a2, b2) - expect) < 1e-13);
    CHECK_THROWS_AS(spectral::box_mean(c, 0.5, 0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("resample up and back down is the identity on resolved data") {
    const Grid coarse(16, 17, 2.0), fine(32, 33, 2.0);
    auto fn = [&](double x, double y) { return std::sin(coarse.wavenumber(3) * x) * std::pow(y, 5) + std::cos(coarse.wavenumber(1) * x); };
    const auto c = spectral::to_spectral(PhysicalField::sample(coarse, fn));
    const auto up = spectral::resample(c, fine);
    CHECK(max_diff(spectral::to_physical(up), PhysicalField::sample(fine, fn)) < 1e-13);
    const auto back = spectral::to_physical(spectral::resample(up, coarse));
    CHECK(max_diff(back, PhysicalField::sample(coarse, fn)) < 1e-13);
    CHECK_THROWS_AS(spectral::resample(c, Grid(32, 33, 1.0)), std::invalid_argument);
}

TEST_CASE("field arithmetic checks grids") {
    PhysicalField a(Grid(8, 9, 1.0)), b(Grid(8, 9, 2.0));
    CHECK_THROWS_AS(a += b, std::invalid_argument);
    PhysicalField c(Grid(8, 9, 1.0));
    CHECK_NOTHROW(a += c);
}

}
