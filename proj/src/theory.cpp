#include "bda/theory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace bda::theory {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double lambda1(double length) {
    require_positive(length, "lambda1: L");
    return 2.0 * std::numbers::pi * std::min(1.0, 1.0 / length);
}

Rho attractor_rho(double nu, double a_coeff, double b_coeff) {
    require_positive(nu, "attractor_rho: nu");
    require_positive(a_coeff, "attractor_rho: a");
    require_positive(b_coeff, "attractor_rho: b");
    const double log_rho = std::log(a_coeff) - 3.0 * std::log(nu) + b_coeff * std::pow(nu, -8.0);
    if (!(log_rho < std::log(std::numeric_limits<double>::max()))) return {kInf, true};
    return {std::exp(log_rho), false};
}

double mu_lower_bound(double nu, double kappa, double lam1, double rho) {
    require_positive(nu, "mu_lower_bound: nu");
    require_positive(kappa, "mu_lower_bound: kappa");
    require_positive(lam1, "mu_lower_bound: lambda1");
    if (!(rho > 0.0)) throw std::invalid_argument("mu_lower_bound: rho must be positive");
    if (std::isinf(rho)) return kInf;
    return 1.0 / (kappa * lam1) + rho / nu + rho * rho / (kappa * kappa * lam1 * nu);
}

double h_max(double mu, double nu, double c0) {
    require_positive(mu, "h_max: mu");
    require_positive(nu, "h_max: nu");
    require_positive(c0, "h_max: c0");
    return std::sqrt(nu / (mu * c0 * c0));
}

double decay_rate_bound(double nu, double kappa, double lam1) {
    require_positive(nu, "decay_rate_bound: nu");
    require_positive(kappa, "decay_rate_bound: kappa");
    require_positive(lam1, "decay_rate_bound: lambda1");
    return lam1 * std::min(nu, kappa);
}

BoundReport bound_report(const BoundInputs& in) {
    require_positive(in.ra, "Ra");
    require_positive(in.pr, "Pr");
    if (!(in.mu_used >= 0.0) || !std::isfinite(in.mu_used)) throw std::invalid_argument("mu must be finite and >= 0");
    require_positive(in.h_used, "h");
    BoundReport r;
    r.nu = std::sqrt(in.pr / in.ra);
    r.kappa = 1.0 / std::sqrt(in.pr * in.ra);
    r.lambda1 = lambda1(in.length);
    const Rho rho = attractor_rho(r.nu, in.rho_a, in.rho_b);
    r.rho = rho.value;
    r.rho_overflow = rho.overflow;
    r.mu_min = mu_lower_bound(r.nu, r.kappa, r.lambda1, r.rho);
    // Without nudging the resolution condition places no limit on h.
    r.h_max = in.mu_used > 0.0 ? h_max(in.mu_used, r.nu, in.c0) : kInf;
    r.decay_rate = decay_rate_bound(r.nu, r.kappa, r.lambda1);
    r.mu_used = in.mu_used;
    r.h_used = in.h_used;
    r.mu_ratio = r.mu_used / r.mu_min;
    r.h_ratio = r.h_used / r.h_max;
    return r;
}

void write_text(std::ostream& os, const BoundReport& r) {
    const auto flags = os.flags();
    os << std::setprecision(6);
    os << "sufficient conditions for synchronization (order-of-magnitude, O(1) constants = config values)\n";
    os << "  nu            " << r.nu << "\n";
    os << "  kappa         " << r.kappa << "\n";
    os << "  lambda1       " << r.lambda1 << "\n";
    if (r.rho_overflow) {
        os << "  rho           overflow\n";
        os << "  mu_min        bound vacuous at this Ra\n";
    } else {
        os << "  rho           " << r.rho << "\n";
        os << "  mu_min        " << r.mu_min << "\n";
    }
    os << "  mu_used       " << r.mu_used << (r.mu_below_bound() ? "   [below mu_min]" : "") << "\n";
    os << "  h_max(mu)     " << r.h_max << "\n";
    os << "  h_used        " << r.h_used << (r.h_above_bound() ? "   [above h_max]" : "") << "\n";
    os << "  h_used/h_max  " << r.h_ratio << "\n";
    os << "  decay rate    " << r.decay_rate << "\n";
    os.flags(flags);
}

void write_key_values(std::ostream& os, const BoundReport& r) {
    const auto flags = os.flags();
    const auto prec = os.precision(17);
    os << "nu=" << r.nu << "\n"
       << "kappa=" << r.kappa << "\n"
       << "lambda1=" << r.lambda1 << "\n"
       << "rho=" << r.rho << "\n"
       << "rho_overflow=" << (r.rho_overflow ? 1 : 0) << "\n"
       << "mu_min=" << r.mu_min << "\n"
       << "h_max=" << r.h_max << "\n"
       << "decay_rate=" << r.decay_rate << "\n"
       << "mu_used=" << r.mu_used << "\n"
       << "h_used=" << r.h_used << "\n"
       << "mu_ratio=" << r.mu_ratio << "\n"
       << "h_ratio=" << r.h_ratio << "\n"
       << "mu_below_bound=" << (r.mu_below_bound() ? 1 : 0) << "\n"
       << "h_above_bound=" << (r.h_above_bound() ? 1 : 0) << "\n";
    os.precision(prec);
    os.flags(flags);
}

}  // namespace bda::theory
