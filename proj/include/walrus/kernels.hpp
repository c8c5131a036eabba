#pragma once

// Hot loops in two flavours: an OpenMP version used by the library and a plain
// serial reference kept for tests and the benchmark. Each pair must produce
// bit-identical results, so the per-row/per-mode arithmetic order is shared.

#include "walrus/cascade.hpp"
#include "walrus/frame.hpp"
#include "walrus/types.hpp"

#include <span>
#include <vector>

namespace walrus::kernels {

struct WaveletGeometry {
  int order_p;
  double shift_m;
};

// rows(i, k) = element_i(t_k) for wavelet descriptors.
void sample_wavelet_rows(const Cascade& c, const WaveletGeometry& geo,
                         const std::vector<ElementDescriptor>& desc, RowMat& rows);
void sample_wavelet_rows_serial(const Cascade& c, const WaveletGeometry& geo,
                                const std::vector<ElementDescriptor>& desc, RowMat& rows);

void derivative_rows(const RowMat& rows, RowMat& out);
void derivative_rows_serial(const RowMat& rows, RowMat& out);

// Per-mode GBT recurrence. Returns the final diagonal state; when `trace` is
// non-null, also records the state after each sample where (k+1) % stride == 0
// or k is the last sample (one row per emission).
CVec diagonal_scan(const CVec& lambda, const CVec& b, std::span<const double> u, const Measure& m,
                   double alpha, long stride = 0, CRowMat* trace = nullptr);
CVec diagonal_scan_serial(const CVec& lambda, const CVec& b, std::span<const double> u, const Measure& m,
                          double alpha, long stride = 0, CRowMat* trace = nullptr);

// K(i, j): weight of input sample j in the final state of mode i, input factor
// b excluded. Translated rows are truncated where |a|^n < tail_tol.
CRowMat kernel_rows(const CVec& lambda, long length, const Measure& m, double alpha, double tail_tol);
CRowMat kernel_rows_serial(const CVec& lambda, long length, const Measure& m, double alpha, double tail_tol);

// Scalar GBT factors for one mode at step k: c+ = a c + b_in u.
struct ModeStep {
  std::complex<double> a;
  std::complex<double> b_in;
};
ModeStep mode_step(std::complex<double> lambda, long k, const Measure& m, double alpha);

}  // namespace walrus::kernels
