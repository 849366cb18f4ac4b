#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bda/convection.hpp"

namespace bda::io {

struct ErrorNorms {
    double u = 0.0;
    double theta = 0.0;
    double omega = 0.0;
};

/// L2 norms of the velocity, temperature and vorticity differences. The
/// velocity difference is reconstructed through the streamfunction solve.
ErrorNorms error_norms(const convection::FieldPair& ref, const convection::FieldPair& da,
                       const elliptic::PoissonSolver& ps);

struct RateFit {
    double rate = 0.0;  // slope of ln(e) against t
    double r2 = 0.0;
    std::size_t used = 0;
};

/// Samples below this value are treated as having hit round-off and skipped.
inline constexpr double kErrorFloor = 1e-14;

/// Least-squares fit of ln(e) = a + rate * t over the samples at or above
/// kErrorFloor. Throws std::invalid_argument if fewer than 8 remain or if any
/// sample is negative or not finite.
RateFit fit_exponential_rate(std::span<const double> t, std::span<const double> e);

/// Fit over the second half of the samples, skipping the initial transient.
RateFit fit_second_half(std::span<const double> t, std::span<const double> e);

/// File-system and file-format failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- checkpoints -----------------------------------------------------------

inline constexpr char kCheckpointMagic[16] = {'B', 'E', 'N', 'A', 'R', 'D', '-', 'D',
                                              'A', '-', 'C', 'K', 'P', 'T', '1', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class CheckpointErrorKind { io, bad_magic, version_mismatch, checksum_mismatch, malformed };

class CheckpointError : public IoError {
public:
    CheckpointError(CheckpointErrorKind kind, const std::string& what) : IoError(what), kind_(kind) {}
    CheckpointErrorKind kind() const noexcept { return kind_; }

private:
    CheckpointErrorKind kind_;
};

struct Checkpoint {
    convection::PhysParams params;
    convection::State state;
};

/// Binary layout (all little-endian):
///   16 B  magic "BENARD-DA-CKPT1\0"
///   u32   format version, u32 nx1, u32 nx2, u32 reserved (0)
///   f64   L, Ra, Pr, t
///   f64   omega[nx1 * nx2], theta[nx1 * nx2]   (x2 fastest)
///   u64   FNV-1a hash of every byte between the magic and the hash
void write_checkpoint(const std::string& path, const convection::State& s, const convection::PhysParams& pp);
Checkpoint read_checkpoint(const std::string& path);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

// --- time series -----------------------------------------------------------

struct TwinRecord {
    double t = 0.0;
    double err_u = 0.0;
    double err_theta = 0.0;
    double err_omega = 0.0;
    double nu_ref = 0.0;
    double nu_da = 0.0;

    bool operator==(const TwinRecord&) const = default;
};

inline constexpr const char* kTimeSeriesHeader = "t,err_u,err_theta,err_omega,nu_ref,nu_da";

/// CSV with the header above and 17 significant digits; t must be strictly
/// increasing. Throws IoError on I/O failure or malformed input.
void write_timeseries(const std::string& path, std::span<const TwinRecord> records);
std::vector<TwinRecord> read_timeseries(const std::string& path);

/// "t,nu" CSV for reference runs.
void write_nusselt_series(const std::string& path, std::span<const double> t, std::span<const double> nu);

/// Whitespace-separated columns t, log10(err_u), log10(err_theta),
/// log10(err_omega) with a '#' header line; zero errors are written as nan.
void write_plotdata(const std::string& path, std::span<const TwinRecord> records);

}  // namespace bda::io
