#pragma once

#include <fftw3.h>

#include "bda/grid.hpp"

namespace bda::detail {

// FFTW plans for one grid. Planned with FFTW_ESTIMATE so that two grids of the
// same shape always execute identical algorithms (bitwise reproducibility).
// Plans are executed through the new-array interface, which is thread-safe.
struct FftPlans {
    FftPlans(int nx1, int nx2);
    ~FftPlans();
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    fftw_plan r2c = nullptr;  // physical -> modal along x1, all x2 rows
    fftw_plan c2r = nullptr;  // modal -> physical (destroys its input)
    fftw_plan dct = nullptr;  // DCT-I along x2 on interleaved complex modal data
};

}  // namespace bda::detail
