#include "bda/grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft_plans.hpp"

namespace bda {

namespace detail {

namespace {
// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlans::FftPlans(int nx1, int nx2) {
    const int nk = nx1 / 2 + 1;
    const unsigned flags = FFTW_ESTIMATE;
    AlignedVector<double> real(std::size_t(nx1) * nx2);
    AlignedVector<double> cplx(std::size_t(2) * nk * nx2);
    auto* c = reinterpret_cast<fftw_complex*>(cplx.data());

    std::lock_guard lock(planner_mutex());
    r2c = fftw_plan_many_dft_r2c(1, &nx1, nx2, real.data(), nullptr, nx2, 1, c, nullptr, nx2, 1, flags);
    c2r = fftw_plan_many_dft_c2r(1, &nx1, nx2, c, nullptr, nx2, 1, real.data(), nullptr, nx2, 1, flags);

    fftw_iodim dim{nx2, 2, 2};
    fftw_iodim howmany[2] = {{nk, 2 * nx2, 2 * nx2}, {2, 1, 1}};
    fftw_r2r_kind kind = FFTW_REDFT00;
    dct = fftw_plan_guru_r2r(1, &dim, 2, howmany, cplx.data(), cplx.data(), &kind, flags);

    if (!r2c || !c2r || !dct) throw std::runtime_error("FFTW planning failed");
}

FftPlans::~FftPlans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    if (dct) fftw_destroy_plan(dct);
}

}  // namespace detail

struct Grid::Data {
    int nx1;
    int nx2;
    double length;
    std::vector<double> x1, x2, w1, w2;
    detail::FftPlans plans;

    Data(int n1, int n2, double len) : nx1(n1), nx2(n2), length(len), plans(n1, n2) {}
};

namespace {

// Clenshaw-Curtis weights for the Gauss-Lobatto points of degree n on [-1, 1].
std::vector<double> clenshaw_curtis(int n) {
    using std::numbers::pi;
    std::vector<double> w(n + 1, 0.0);
    std::vector<double> v(n - 1, 1.0);
    const double nn = double(n) * n;
    if (n % 2 == 0) {
        w[0] = w[n] = 1.0 / (nn - 1.0);
        for (int k = 1; k < n / 2; ++k)
            for (int i = 1; i < n; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * pi * i / n) / (4.0 * k * k - 1.0);
        for (int i = 1; i < n; ++i) v[i - 1] -= std::cos(pi * i) / (nn - 1.0);
    } else {
        w[0] = w[n] = 1.0 / nn;
        for (int k = 1; k <= (n - 1) / 2; ++k)
            for (int i = 1; i < n; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * pi * i / n) / (4.0 * k * k - 1.0);
    }
    for (int i = 1; i < n; ++i) w[i] = 2.0 * v[i - 1] / n;
    return w;
}

}  // namespace

Grid::Grid(int nx1, int nx2, double length) {
    if (nx1 < 8 || nx1 % 2 != 0)
        throw std::invalid_argument("nx1 must be even and >= 8, got " + std::to_string(nx1));
    if (nx2 < 9) throw std::invalid_argument("nx2 must be >= 9, got " + std::to_string(nx2));
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("L must be positive");

    auto d = std::make_shared<Data>(nx1, nx2, length);
    const int n = nx2 - 1;
    d->x1.resize(nx1);
    d->w1.assign(nx1, length / nx1);
    for (int j = 0; j < nx1; ++j) d->x1[j] = j * length / nx1;

    d->x2.resize(nx2);
    for (int i = 0; i < nx2; ++i) d->x2[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * i / n));
    // Exact walls and exact mirror symmetry about x2 = 1/2.
    d->x2[0] = 0.0;
    d->x2[n] = 1.0;
    for (int i = 0; i < nx2 / 2; ++i) d->x2[n - i] = 1.0 - d->x2[i];
    if (n % 2 == 0) d->x2[n / 2] = 0.5;

    d->w2 = clenshaw_curtis(n);
    for (auto& w : d->w2) w *= 0.5;
    data_ = std::move(d);
}

int Grid::nx1() const noexcept { return data_->nx1; }
int Grid::nx2() const noexcept { return data_->nx2; }
double Grid::length() const noexcept { return data_->length; }
std::span<const double> Grid::x1() const noexcept { return data_->x1; }
std::span<const double> Grid::x2() const noexcept { return data_->x2; }
std::span<const double> Grid::w1() const noexcept { return data_->w1; }
std::span<const double> Grid::w2() const noexcept { return data_->w2; }

double Grid::wavenumber(int k) const noexcept { return 2.0 * std::numbers::pi * k / data_->length; }

bool Grid::operator==(const Grid& other) const noexcept {
    return data_ == other.data_ ||
           (nx1() == other.nx1() && nx2() == other.nx2() && length() == other.length());
}

const detail::FftPlans& Grid::plans() const noexcept { return data_->plans; }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace bda
