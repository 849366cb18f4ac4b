#include "bda/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace bda::io {

using convection::FieldPair;
using convection::PhysParams;
using convection::State;

ErrorNorms error_norms(const FieldPair& ref, const FieldPair& da, const elliptic::PoissonSolver& ps) {
    const PhysicalField dw = ref.omega - da.omega;
    const PhysicalField dt = ref.theta - da.theta;
    const auto du = elliptic::velocity(ps.solve(spectral::to_spectral(dw)));
    ErrorNorms e;
    e.u = std::sqrt(spectral::l2_inner(du.u1, du.u1) + spectral::l2_inner(du.u2, du.u2));
    e.theta = spectral::l2_norm(dt);
    e.omega = spectral::l2_norm(dw);
    return e;
}

RateFit fit_exponential_rate(std::span<const double> t, std::span<const double> e) {
    if (t.size() != e.size()) throw std::invalid_argument("fit_exponential_rate: size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t n = 0; n < t.size(); ++n) {
        if (!(e[n] >= 0.0) || !std::isfinite(e[n]) || !std::isfinite(t[n]))
            throw std::invalid_argument("fit_exponential_rate: samples must be finite with e >= 0");
        if (e[n] < kErrorFloor) continue;
        xs.push_back(t[n]);
        ys.push_back(std::log(e[n]));
    }
    if (xs.size() < 8) throw std::invalid_argument("fit_exponential_rate: need at least 8 samples above the floor");

    const double count = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        mx += xs[n];
        my += ys[n];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        sxx += (xs[n] - mx) * (xs[n] - mx);
        sxy += (xs[n] - mx) * (ys[n] - my);
        syy += (ys[n] - my) * (ys[n] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_exponential_rate: degenerate sample times");
    RateFit fit;
    fit.rate = sxy / sxx;
    fit.used = xs.size();
    double ss_res = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        const double r = ys[n] - (my + fit.rate * (xs[n] - mx));
        ss_res += r * r;
    }
    // A flat series fits perfectly.
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

RateFit fit_second_half(std::span<const double> t, std::span<const double> e) {
    const std::size_t half = t.size() / 2;
    return fit_exponential_rate(t.subspan(half), e.subspan(half));
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<unsigned char>(v >> s));
}
void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) out.push_back(static_cast<unsigned char>(v >> s));
}
void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}
std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

constexpr std::size_t kHeaderBytes = 16 + 16 + 32;

}  // namespace

void write_checkpoint(const std::string& path, const State& s, const PhysParams& pp) {
    const Grid& g = s.grid();
    std::vector<unsigned char> buf(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
    buf.reserve(kHeaderBytes + 16 * g.size() + 8);
    put_u32(buf, kCheckpointVersion);
    put_u32(buf, std::uint32_t(g.nx1()));
    put_u32(buf, std::uint32_t(g.nx2()));
    put_u32(buf, 0);
    put_f64(buf, g.length());
    put_f64(buf, pp.ra());
    put_f64(buf, pp.pr());
    put_f64(buf, s.t);
    for (double v : s.omega.data()) put_f64(buf, v);
    for (double v : s.theta.data()) put_f64(buf, v);
    put_u64(buf, fnv1a64(std::span(buf).subspan(16)));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(CheckpointErrorKind::io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw CheckpointError(CheckpointErrorKind::io, "write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError(CheckpointErrorKind::io, "cannot open " + path);
    const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 16 || std::memcmp(buf.data(), kCheckpointMagic, 16) != 0)
        throw CheckpointError(CheckpointErrorKind::bad_magic, "not a checkpoint (bad magic): " + path);
    if (buf.size() < kHeaderBytes + 8 ||
        fnv1a64(std::span(buf).subspan(16, buf.size() - 24)) != get_u64(buf.data() + buf.size() - 8))
        throw CheckpointError(CheckpointErrorKind::checksum_mismatch, "checksum mismatch (corrupt or truncated): " + path);

    const unsigned char* p = buf.data() + 16;
    const std::uint32_t version = get_u32(p);
    if (version != kCheckpointVersion)
        throw CheckpointError(CheckpointErrorKind::version_mismatch,
                              "unsupported checkpoint version " + std::to_string(version));
    const int nx1 = int(get_u32(p + 4));
    const int nx2 = int(get_u32(p + 8));
    const double length = get_f64(p + 16);
    const double ra = get_f64(p + 24);
    const double pr = get_f64(p + 32);
    const double t = get_f64(p + 40);

    const std::size_t n = std::size_t(nx1) * std::size_t(nx2);
    if (buf.size() != kHeaderBytes + 16 * n + 8)
        throw CheckpointError(CheckpointErrorKind::malformed, "checkpoint size does not match its grid: " + path);

    try {
        Grid g(nx1, nx2, length);
        PhysParams pp(ra, pr, length);
        State s(convection::FieldPair{PhysicalField(g), PhysicalField(g)}, t);
        const unsigned char* q = buf.data() + kHeaderBytes;
        for (double& v : s.omega.data()) {
            v = get_f64(q);
            q += 8;
        }
        for (double& v : s.theta.data()) {
            v = get_f64(q);
            q += 8;
        }
        return {pp, std::move(s)};
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(CheckpointErrorKind::malformed, std::string("invalid checkpoint header: ") + e.what());
    }
}

namespace {

std::ofstream open_text(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_timeseries(const std::string& path, std::span<const TwinRecord> records) {
    for (std::size_t n = 1; n < records.size(); ++n)
        if (!(records[n].t > records[n - 1].t))
            throw std::invalid_argument("write_timeseries: t must be strictly increasing");
    std::ofstream out = open_text(path);
    out << kTimeSeriesHeader << '\n';
    for (const auto& r : records) {
        out << format17(r.t) << ',' << format17(r.err_u) << ',' << format17(r.err_theta) << ','
            << format17(r.err_omega) << ',' << format17(r.nu_ref) << ',' << format17(r.nu_da) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<TwinRecord> read_timeseries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kTimeSeriesHeader)
        throw IoError("unexpected time-series header in " + path);
    std::vector<TwinRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v[6];
        const char* p = line.c_str();
        for (int c = 0; c < 6; ++c) {
            char* end = nullptr;
            v[c] = std::strtod(p, &end);
            if (end == p || (c < 5 && *end != ',') || (c == 5 && *end != '\0'))
                throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
            p = end + 1;
        }
        TwinRecord r{v[0], v[1], v[2], v[3], v[4], v[5]};
        if (!out.empty() && !(r.t > out.back().t))
            throw IoError(path + ":" + std::to_string(lineno) + ": t not strictly increasing");
        out.push_back(r);
    }
    return out;
}

void write_nusselt_series(const std::string& path, std::span<const double> t, std::span<const double> nu) {
    if (t.size() != nu.size()) throw std::invalid_argument("write_nusselt_series: size mismatch");
    std::ofstream out = open_text(path);
    out << "t,nu\n";
    for (std::size_t n = 0; n < t.size(); ++n) out << format17(t[n]) << ',' << format17(nu[n]) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_plotdata(const std::string& path, std::span<const TwinRecord> records) {
    std::ofstream out = open_text(path);
    out << "# t log10_err_u log10_err_theta log10_err_omega\n";
    auto lg = [](double e) { return e > 0.0 ? format17(std::log10(e)) : std::string("nan"); };
    for (const auto& r : records)
        out << format17(r.t) << ' ' << lg(r.err_u) << ' ' << lg(r.err_theta) << ' ' << lg(r.err_omega) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace bda::io
