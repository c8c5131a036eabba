#include "walrus/convolution.hpp"

#include <fftw3.h>

#include <memory>
#include <omp.h>

namespace walrus {

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer alloc(long n) { return Buffer(fftw_alloc_complex(static_cast<std::size_t>(n))); }

long next_pow2(long n) {
  long p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Plans are created once on aligned scratch and executed with the new-array
// interface, which FFTW documents as thread-safe.
struct Plans {
  long size;
  fftw_plan fwd, inv;
  explicit Plans(long n) : size(n) {
    Buffer a = alloc(n), b = alloc(n);
#pragma omp critical(walrus_fftw_planner)
    {
      fwd = fftw_plan_dft_1d(static_cast<int>(n), a.get(), b.get(), FFTW_FORWARD, FFTW_ESTIMATE);
      inv = fftw_plan_dft_1d(static_cast<int>(n), a.get(), b.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }
  ~Plans() {
#pragma omp critical(walrus_fftw_planner)
    {
      fftw_destroy_plan(fwd);
      fftw_destroy_plan(inv);
    }
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

long last_nonzero(const CRowMat& h) {
  long k = 0;
  for (long i = 0; i < h.rows(); ++i)
    for (long j = h.cols() - 1; j >= k; --j)
      if (h(i, j) != std::complex<double>(0.0)) {
        k = j + 1;
        break;
      }
  return k;
}

void convolve_row(const Plans& p, const fftw_complex* xf, const std::complex<double>* h, long hk, long n,
                  fftw_complex* work, fftw_complex* spec, std::complex<double>* out) {
  for (long j = 0; j < p.size; ++j) {
    const std::complex<double> v = j < hk ? h[j] : 0.0;
    work[j][0] = v.real();
    work[j][1] = v.imag();
  }
  fftw_execute_dft(p.fwd, work, spec);
  for (long j = 0; j < p.size; ++j) {
    const double re = spec[j][0] * xf[j][0] - spec[j][1] * xf[j][1];
    const double im = spec[j][0] * xf[j][1] + spec[j][1] * xf[j][0];
    spec[j][0] = re;
    spec[j][1] = im;
  }
  fftw_execute_dft(p.inv, spec, work);
  const double scale = 1.0 / static_cast<double>(p.size);
  for (long t = 0; t < n; ++t) out[t] = {work[t][0] * scale, work[t][1] * scale};
}

template <bool Parallel>
CRowMat convolve_fft(const CRowMat& h, std::span<const double> x) {
  const long n = static_cast<long>(x.size());
  CRowMat out = CRowMat::Zero(h.rows(), n);
  if (n == 0 || h.rows() == 0) return out;
  const long hk = std::min(last_nonzero(h), n);
  if (hk == 0) return out;
  const Plans plans(next_pow2(n + hk - 1));
  const long size = plans.size;

  Buffer xin = alloc(size), xf = alloc(size);
  for (long j = 0; j < size; ++j) {
    xin[j][0] = j < n ? x[j] : 0.0;
    xin[j][1] = 0.0;
  }
  fftw_execute_dft(plans.fwd, xin.get(), xf.get());

  if constexpr (Parallel) {
#pragma omp parallel
    {
      Buffer work = alloc(size), spec = alloc(size);
#pragma omp for schedule(static)
      for (long i = 0; i < h.rows(); ++i)
        convolve_row(plans, xf.get(), h.row(i).data(), hk, n, work.get(), spec.get(), out.row(i).data());
    }
  } else {
    Buffer work = alloc(size), spec = alloc(size);
    for (long i = 0; i < h.rows(); ++i)
      convolve_row(plans, xf.get(), h.row(i).data(), hk, n, work.get(), spec.get(), out.row(i).data());
  }
  return out;
}

}  // namespace

CRowMat causal_convolve_rows(const CRowMat& h, std::span<const double> x) { return convolve_fft<true>(h, x); }

CRowMat causal_convolve_rows_serial(const CRowMat& h, std::span<const double> x) {
  return convolve_fft<false>(h, x);
}

CRowMat causal_convolve_rows_direct(const CRowMat& h, std::span<const double> x) {
  const long n = static_cast<long>(x.size());
  const long hk = std::min(last_nonzero(h), n);
  CRowMat out = CRowMat::Zero(h.rows(), n);
  for (long i = 0; i < h.rows(); ++i)
    for (long t = 0; t < n; ++t) {
      std::complex<double> acc = 0.0;
      for (long j = 0; j < hk && j <= t; ++j) acc += h(i, j) * x[t - j];
      out(i, t) = acc;
    }
  return out;
}

}  // namespace walrus
