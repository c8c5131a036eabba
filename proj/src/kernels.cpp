#include "walrus/kernels.hpp"

#include <cmath>

namespace walrus::kernels {

namespace {

void sample_one(const Cascade& c, const WaveletGeometry& geo, const ElementDescriptor& d, double* out, long L) {
  const double off = wavelet_offset(geo.order_p, geo.shift_m, d.scale, d.shift_index);
  const double inv = 1.0 / static_cast<double>(L - 1);
  for (long k = 0; k < L; ++k) out[k] = wavelet_sample(c, d.kind, d.scale, off, static_cast<double>(k) * inv);
}

void derivative_one(const double* f, double* d, long L) {
  const double h = 1.0 / static_cast<double>(L - 1);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (long k = 1; k + 1 < L; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
  d[L - 1] = (3.0 * f[L - 1] - 4.0 * f[L - 2] + f[L - 3]) / (2.0 * h);
}

bool emits(long k, long n, long stride) { return (k + 1) % stride == 0 || k + 1 == n; }

template <bool Trace>
std::complex<double> scan_one(std::complex<double> lambda, std::complex<double> b, std::span<const double> u,
                              const Measure& m, double alpha, long stride, CRowMat* trace, long mode) {
  const long n = static_cast<long>(u.size());
  std::complex<double> x = 0.0;
  long row = 0;
  if (m.is_scaled()) {
    for (long k = 0; k < n; ++k) {
      const ModeStep s = mode_step(lambda, k, m, alpha);
      x = s.a * x + s.b_in * b * u[k];
      if constexpr (Trace)
        if (emits(k, n, stride)) (*trace)(row++, mode) = x;
    }
  } else {
    const ModeStep s = mode_step(lambda, 0, m, alpha);
    const std::complex<double> bin = s.b_in * b;
    for (long k = 0; k < n; ++k) {
      x = s.a * x + bin * u[k];
      if constexpr (Trace)
        if (emits(k, n, stride)) (*trace)(row++, mode) = x;
    }
  }
  return x;
}

void kernel_one(std::complex<double> lambda, long length, const Measure& m, double alpha, double tail_tol,
                std::complex<double>* out) {
  // Backward product: out[j] = (prod_{k>j} a_k) * b_j.
  std::complex<double> prod = 1.0;
  long j = length - 1;
  for (; j >= 0; --j) {
    const ModeStep s = mode_step(lambda, j, m, alpha);
    out[j] = prod * s.b_in;
    prod *= s.a;
    if (!m.is_scaled() && std::abs(prod) < tail_tol) {
      --j;
      break;
    }
  }
  for (; j >= 0; --j) out[j] = 0.0;
}

long emission_count(long n, long stride) { return n == 0 ? 0 : (n + stride - 1) / stride; }

}  // namespace

ModeStep mode_step(std::complex<double> lambda, long k, const Measure& m, double alpha) {
  if (m.is_scaled()) {
    const double d0 = static_cast<double>(k + 1), d1 = static_cast<double>(k + 2);
    const std::complex<double> den = 1.0 + alpha * lambda / d1;
    return {(1.0 - (1.0 - alpha) * lambda / d0) / den, (1.0 / d0) / den};
  }
  const double th = static_cast<double>(m.theta);
  const std::complex<double> den = 1.0 + alpha * lambda / th;
  return {(1.0 - (1.0 - alpha) * lambda / th) / den, (1.0 / th) / den};
}

void sample_wavelet_rows(const Cascade& c, const WaveletGeometry& geo, const std::vector<ElementDescriptor>& desc,
                         RowMat& rows) {
  const long n = static_cast<long>(desc.size()), L = rows.cols();
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) sample_one(c, geo, desc[i], rows.row(i).data(), L);
}

void sample_wavelet_rows_serial(const Cascade& c, const WaveletGeometry& geo,
                                const std::vector<ElementDescriptor>& desc, RowMat& rows) {
  const long n = static_cast<long>(desc.size()), L = rows.cols();
  for (long i = 0; i < n; ++i) sample_one(c, geo, desc[i], rows.row(i).data(), L);
}

void derivative_rows(const RowMat& rows, RowMat& out) {
  out.resize(rows.rows(), rows.cols());
  const long n = rows.rows(), L = rows.cols();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) derivative_one(rows.row(i).data(), out.row(i).data(), L);
}

void derivative_rows_serial(const RowMat& rows, RowMat& out) {
  out.resize(rows.rows(), rows.cols());
  for (long i = 0; i < rows.rows(); ++i) derivative_one(rows.row(i).data(), out.row(i).data(), rows.cols());
}

CVec diagonal_scan(const CVec& lambda, const CVec& b, std::span<const double> u, const Measure& m, double alpha,
                   long stride, CRowMat* trace) {
  const long n = lambda.size();
  CVec out(n);
  if (trace) trace->resize(emission_count(static_cast<long>(u.size()), stride), n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    out(i) = trace ? scan_one<true>(lambda(i), b(i), u, m, alpha, stride, trace, i)
                   : scan_one<false>(lambda(i), b(i), u, m, alpha, stride, nullptr, i);
  return out;
}

CVec diagonal_scan_serial(const CVec& lambda, const CVec& b, std::span<const double> u, const Measure& m,
                          double alpha, long stride, CRowMat* trace) {
  const long n = lambda.size();
  CVec out(n);
  if (trace) trace->resize(emission_count(static_cast<long>(u.size()), stride), n);
  for (long i = 0; i < n; ++i)
    out(i) = trace ? scan_one<true>(lambda(i), b(i), u, m, alpha, stride, trace, i)
                   : scan_one<false>(lambda(i), b(i), u, m, alpha, stride, nullptr, i);
  return out;
}

CRowMat kernel_rows(const CVec& lambda, long length, const Measure& m, double alpha, double tail_tol) {
  CRowMat k(lambda.size(), length);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < lambda.size(); ++i) kernel_one(lambda(i), length, m, alpha, tail_tol, k.row(i).data());
  return k;
}

CRowMat kernel_rows_serial(const CVec& lambda, long length, const Measure& m, double alpha, double tail_tol) {
  CRowMat k(lambda.size(), length);
  for (long i = 0; i < lambda.size(); ++i) kernel_one(lambda(i), length, m, alpha, tail_tol, k.row(i).data());
  return k;
}

}  // namespace walrus::kernels
