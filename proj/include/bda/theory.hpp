#pragma once

#include <iosfwd>
#include <string>

namespace bda::theory {

/// 2 pi min(1, 1/L).
double lambda1(double length);

struct Rho {
    double value = 0.0;     // +inf on overflow
    bool overflow = false;
};

/// a nu^-3 exp(b nu^-8), evaluated in log space so overflow is detected
/// rather than produced by accident.
Rho attractor_rho(double nu, double a_coeff = 1.0, double b_coeff = 1.0);

/// 1/(kappa lambda1) + rho/nu + rho^2/(kappa^2 lambda1 nu).
double mu_lower_bound(double nu, double kappa, double lam1, double rho);

/// sqrt(nu / (mu c0^2)).
double h_max(double mu, double nu, double c0 = 1.0);

/// lambda1 min(nu, kappa).
double decay_rate_bound(double nu, double kappa, double lam1);

struct BoundInputs {
    double ra = 0.0;
    double pr = 1.0;
    double length = 2.0;
    double mu_used = 1.0;
    double h_used = 0.0;
    double c0 = 1.0;
    double rho_a = 1.0;
    double rho_b = 1.0;
};

struct BoundReport {
    double nu = 0.0;
    double kappa = 0.0;
    double lambda1 = 0.0;
    double rho = 0.0;
    bool rho_overflow = false;
    double mu_min = 0.0;  // +inf when rho overflows
    double h_max = 0.0;   // for mu_used
    double decay_rate = 0.0;
    double mu_used = 0.0;
    double h_used = 0.0;
    double mu_ratio = 0.0;  // mu_used / mu_min
    double h_ratio = 0.0;   // h_used / h_max

    bool mu_below_bound() const noexcept { return mu_used < mu_min; }
    bool h_above_bound() const noexcept { return h_used > h_max; }
};

/// Throws std::invalid_argument on non-positive inputs.
BoundReport bound_report(const BoundInputs& in);

/// Human-readable table.
void write_text(std::ostream& os, const BoundReport& r);
/// One key=value pair per line.
void write_key_values(std::ostream& os, const BoundReport& r);

}  // namespace bda::theory
