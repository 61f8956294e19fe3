#pragma once

#include <cstddef>
#include <span>

#include "jamlab/common/numeric.hpp"

namespace jamlab {

// In-place complex DFT of arbitrary length backed by FFTW.
// forward: X[k] = sum_n x[n] exp(-j 2 pi k n / N); inverse is unnormalized.
// Plans are cached per (length, direction); execution is thread-safe.
void fft_inplace(std::span<cplx> data, bool inverse = false);

}  // namespace jamlab
