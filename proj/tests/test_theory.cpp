#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bda/theory.hpp"
#include "doctest.h"

using namespace bda::theory;
using std::numbers::pi;

TEST_SUITE("theory") {

TEST_CASE("lambda1") {
    CHECK(lambda1(2.0) == doctest::Approx(pi));
    CHECK(lambda1(1.0) == doctest::Approx(2 * pi));
    CHECK(lambda1(0.5) == doctest::Approx(2 * pi));
    CHECK_THROWS_AS(lambda1(0.0), std::invalid_argument);
}

TEST_CASE("attractor radius") {
    const Rho r = attractor_rho(1.0);
    CHECK(r.value == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK_FALSE(r.overflow);
    CHECK(attractor_rho(0.5).value > attractor_rho(1.0).value);
    CHECK(attractor_rho(2.0, 3.0, 0.5).value == doctest::Approx(3.0 / 8.0 * std::exp(0.5 / 256.0)));
    const Rho big = attractor_rho(std::sqrt(1.0 / 2.5e7));
    CHECK(big.overflow);
    CHECK(std::isinf(big.value));
    CHECK_THROWS_AS(attractor_rho(0.0), std::invalid_argument);
    CHECK_THROWS_AS(attractor_rho(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("mu lower bound") {
    CHECK(mu_lower_bound(1, 1, 1, 1) == doctest::Approx(3.0));
    const double nu = 0.3, kappa = 0.2, lam = 1.7, rho = 5.0;
    const double third = rho * rho / (kappa * kappa * lam * nu);
    const double third2 = mu_lower_bound(nu, kappa, lam, 2 * rho) - 1 / (kappa * lam) - 2 * rho / nu;
    CHECK(third2 == doctest::Approx(4.0 * third));
    CHECK(std::isinf(mu_lower_bound(nu, kappa, lam, INFINITY)));
    CHECK_THROWS_AS(mu_lower_bound(0, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(mu_lower_bound(1, 1, 1, 0), std::invalid_argument);
}

TEST_CASE("mu lower bound grows at least like Ra^(3/2) at Pr = 1") {
    double prev = 0.0;
    for (double ra : {1e2, 1e3, 1e4, 1e5, 1e6}) {
        const double nu = std::sqrt(1.0 / ra);
        const Rho rho = attractor_rho(nu, 1.0, 1e-40);
        REQUIRE_FALSE(rho.overflow);
        const double m = mu_lower_bound(nu, nu, lambda1(2.0), rho.value);
        CHECK(m >= std::pow(ra, 1.5));
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("h_max") {
    CHECK(h_max(1, 1, 1) == 1.0);
    CHECK(h_max(4.0, 0.3, 1.0) == doctest::Approx(0.5 * h_max(1.0, 0.3, 1.0)));
    CHECK(h_max(1.0, std::sqrt(1.0 / 2.5e7), 1.0) == doctest::Approx(0.0141421).epsilon(1e-5));
    CHECK_THROWS_AS(h_max(0, 1, 1), std::invalid_argument);
}

TEST_CASE("decay rate bound") {
    CHECK(decay_rate_bound(0.1, 0.1, 3.0) == doctest::Approx(0.3));
    CHECK(decay_rate_bound(1e-3, 1e-3, lambda1(2.0)) == doctest::Approx(pi * 1e-3));
    const double pr = 4.0, ra = 1e4;
    CHECK(decay_rate_bound(std::sqrt(pr / ra), 1 / std::sqrt(pr * ra), 1.0) == doctest::Approx(1 / std::sqrt(pr * ra)));
}

TEST_CASE("bound evaluators are monotone in every argument") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int n = 0; n < 200; ++n) {
        const double nu = u(rng), kappa = u(rng), lam = u(rng), rho = u(rng), mu = u(rng), c0 = u(rng), f = 1.0 + u(rng);
        const double m = mu_lower_bound(nu, kappa, lam, rho);
        CHECK(mu_lower_bound(f * nu, kappa, lam, rho) < m);
        CHECK(mu_lower_bound(nu, f * kappa, lam, rho) < m);
        CHECK(mu_lower_bound(nu, kappa, f * lam, rho) < m);
        CHECK(mu_lower_bound(nu, kappa, lam, f * rho) > m);
        const double h = h_max(mu, nu, c0);
        CHECK(h_max(f * mu, nu, c0) < h);
        CHECK(h_max(mu, f * nu, c0) > h);
        CHECK(h_max(mu, nu, f * c0) < h);
        const double d = decay_rate_bound(nu, kappa, lam);
        CHECK(decay_rate_bound(f * nu, f * kappa, lam) > d);
        CHECK(decay_rate_bound(nu, kappa, f * lam) > d);
        CHECK(decay_rate_bound(nu / f, kappa, lam) <= d);
        CHECK(attractor_rho(0.5 + f * nu, 1.0, 0.01).value < attractor_rho(0.5 + nu, 1.0, 0.01).value);
    }
}

TEST_CASE("report at the desk-scale twin parameters raises both flags") {
    const BoundReport r = bound_report({1e6, 1.0, 2.0, 1.0, 1.0 / 8.0, 1.0, 1.0, 1.0});
    CHECK(r.nu == doctest::Approx(1e-3));
    CHECK(r.kappa == doctest::Approx(1e-3));
    CHECK(r.rho_overflow);
    CHECK(std::isinf(r.mu_min));
    CHECK(r.mu_below_bound());
    CHECK(r.h_max == doctest::Approx(std::sqrt(1e-3)));
    CHECK(r.h_above_bound());
    CHECK(r.h_ratio == doctest::Approx(0.125 / std::sqrt(1e-3)));
    CHECK(r.decay_rate == doctest::Approx(pi * 1e-3));

    std::ostringstream text, kv;
    write_text(text, r);
    write_key_values(kv, r);
    CHECK(text.str().find("bound vacuous at this Ra") != std::string::npos);
    CHECK(text.str().find("[below mu_min]") != std::string::npos);
    CHECK(text.str().find("[above h_max]") != std::string::npos);
    CHECK(kv.str().find("mu_below_bound=1\n") != std::string::npos);
    CHECK(kv.str().find("h_above_bound=1\n") != std::string::npos);
    CHECK(kv.str().find("rho_overflow=1\n") != std::string::npos);
}

TEST_CASE("report without overflow and without nudging") {
    const BoundReport r = bound_report({10.0, 1.0, 2.0, 0.0, 0.5, 1.0, 1.0, 1e-3});
    CHECK_FALSE(r.rho_overflow);
    CHECK(std::isfinite(r.mu_min));
    CHECK(r.mu_below_bound());
    CHECK(std::isinf(r.h_max));
    CHECK_FALSE(r.h_above_bound());
    const BoundReport s = bound_report({10.0, 1.0, 2.0, 1e30, 1e-16, 1.0, 1.0, 1e-3});
    CHECK_FALSE(s.mu_below_bound());
    CHECK_FALSE(s.h_above_bound());
    std::ostringstream text;
    write_text(text, s);
    CHECK(text.str().find("vacuous") == std::string::npos);
    CHECK_THROWS_AS(bound_report({10.0, 1.0, 2.0, -1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(bound_report({0.0, 1.0, 2.0, 1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(bound_report({10.0, 1.0, 2.0, 1.0, 0.0}), std::invalid_argument);
}

}
