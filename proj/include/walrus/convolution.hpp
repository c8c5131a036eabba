#pragma once

#include "walrus/types.hpp"

#include <span>

namespace walrus {

// Causal convolution of every row of h with a real input:
//   out(i, t) = sum_{s <= t} h(i, t - s) x[s],  t = 0 .. |x| - 1.
CRowMat causal_convolve_rows(const CRowMat& h, std::span<const double> x);         // FFTW, OpenMP over rows
CRowMat causal_convolve_rows_serial(const CRowMat& h, std::span<const double> x);  // FFTW, one row at a time
CRowMat causal_convolve_rows_direct(const CRowMat& h, std::span<const double> x);  // O(n K) reference

}  // namespace walrus
