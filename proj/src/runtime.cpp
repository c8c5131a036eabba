#include "walrus/runtime.hpp"

#include "walrus/convolution.hpp"
#include "walrus/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace walrus {

std::string run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::DenseSequential: return "dense";
    case RunMode::DiagonalSequential: return "diagonal";
    case RunMode::Kernel: return "kernel";
  }
  return "?";
}

RunMode parse_run_mode(const std::string& s) {
  if (s == "dense") return RunMode::DenseSequential;
  if (s == "diagonal") return RunMode::DiagonalSequential;
  if (s == "kernel") return RunMode::Kernel;
  throw ConfigError("unknown run mode '" + s + "' (expected dense, diagonal or kernel)");
}

void RunConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("run.alpha must lie in [0, 1]");
  if (emit_stride < 1) throw ConfigError("run.emit_stride must be >= 1");
}

std::vector<long> emission_times(long n, long stride) {
  std::vector<long> t;
  for (long k = 0; k < n; ++k)
    if ((k + 1) % stride == 0 || k + 1 == n) t.push_back(k + 1);
  return t;
}

namespace {

void check_signal(std::span<const double> u, const Measure& m) {
  for (double v : u)
    if (!std::isfinite(v)) throw ConfigError("signal contains non-finite samples");
  if (!m.is_scaled() && m.theta <= 0) throw ConfigError("translated measure needs theta > 0");
}

// Solves (I + beta H) z = r for upper Hessenberg H, pivoting between adjacent rows.
void hessenberg_solve(const Mat& h, double beta, Vec& r, Mat& work, long step) {
  const long n = h.rows();
  work = beta * h;
  work.diagonal().array() += 1.0;
  for (long j = 0; j + 1 < n; ++j) {
    if (std::abs(work(j + 1, j)) > std::abs(work(j, j))) {
      work.block(j, j, 2, n - j).colwise().reverseInPlace();
      std::swap(r(j), r(j + 1));
    }
    if (work(j, j) == 0.0) continue;
    const double l = work(j + 1, j) / work(j, j);
    if (l != 0.0) {
      work.row(j + 1).tail(n - j) -= l * work.row(j).tail(n - j);
      r(j + 1) -= l * r(j);
    }
  }
  for (long j = n - 1; j >= 0; --j) {
    const double piv = work(j, j);
    if (!(std::abs(piv) > 1e-300))
      throw NumericalError("singular implicit step matrix at step " + std::to_string(step), 0.0);
    const double s = j + 1 < n ? work.row(j).tail(n - j - 1).dot(r.tail(n - j - 1)) : 0.0;
    r(j) = (r(j) - s) / piv;
  }
}

// Modal kernel of a prefix of length T (scaled factors depend on absolute step).
Vec kernel_final(const DiagonalSSM& diag, std::span<const double> u, double alpha) {
  const KernelMatrix k = build_kernel(diag, static_cast<long>(u.size()), alpha);
  return apply_kernel(k, u, diag.b_tilde, diag.v_out);
}

}  // namespace

Vec gbt_step_dense(const SSMOperator& ssm, const Vec& c, double u_k, long k, double alpha, double dt) {
  const long n = ssm.n();
  double d0, d1;
  if (ssm.measure.is_scaled()) {
    d0 = static_cast<double>(k + 1);
    d1 = static_cast<double>(k + 2);
  } else {
    d0 = d1 = static_cast<double>(ssm.measure.theta);
  }
  const Mat lhs = Mat::Identity(n, n) + (dt * alpha / d1) * ssm.a;
  const Vec rhs = c - (dt * (1.0 - alpha) / d0) * (ssm.a * c) + (dt * u_k / d0) * ssm.b;
  Eigen::PartialPivLU<Mat> lu(lhs);
  const double rc = lu.rcond();
  if (!(rc > 1e-15)) throw NumericalError("implicit step matrix is singular at step " + std::to_string(k), rc);
  return lu.solve(rhs);
}

StateTrajectory run_sequential(const SSMOperator& ssm, std::span<const double> signal, const RunConfig& cfg) {
  cfg.validate();
  check_signal(signal, ssm.measure);
  const long len = static_cast<long>(signal.size()), n = ssm.n();
  StateTrajectory out;
  out.times = emission_times(len, cfg.emit_stride);
  out.states.resize(static_cast<long>(out.times.size()), n);
  if (len == 0) return out;
  const double a = cfg.alpha;
  long row = 0;

  if (ssm.measure.is_scaled()) {
    Eigen::HessenbergDecomposition<Mat> hd(ssm.a);
    const Mat q = hd.matrixQ();
    const Mat h = hd.matrixH();
    const Vec qb = q.transpose() * ssm.b;
    Vec z = Vec::Zero(n), r(n);
    Mat work(n, n);
    for (long k = 0; k < len; ++k) {
      const double d0 = static_cast<double>(k + 1), d1 = static_cast<double>(k + 2);
      r = z - ((1.0 - a) / d0) * (h * z) + (signal[k] / d0) * qb;
      hessenberg_solve(h, a / d1, r, work, k);
      z = r;
      if (row < static_cast<long>(out.times.size()) && out.times[row] == k + 1)
        out.states.row(row++) = (q * z).transpose();
    }
  } else {
    const double th = static_cast<double>(ssm.measure.theta);
    Eigen::PartialPivLU<Mat> lu(Mat::Identity(n, n) + (a / th) * ssm.a);
    const double rc = lu.rcond();
    if (!(rc > 1e-15)) throw NumericalError("implicit step matrix is singular", rc);
    const Mat m = lu.solve(Mat::Identity(n, n) - ((1.0 - a) / th) * ssm.a);
    const Vec g = lu.solve(ssm.b / th);
    Vec c = Vec::Zero(n), next(n);
    for (long k = 0; k < len; ++k) {
      next.noalias() = m * c;
      c = next + signal[k] * g;
      if (row < static_cast<long>(out.times.size()) && out.times[row] == k + 1) out.states.row(row++) = c.transpose();
    }
  }
  if (!out.states.allFinite()) throw NumericalError("dense run produced non-finite states");
  return out;
}

StateTrajectory run_sequential(const DiagonalSSM& diag, std::span<const double> signal, const RunConfig& cfg) {
  cfg.validate();
  check_signal(signal, diag.measure);
  const long len = static_cast<long>(signal.size());
  StateTrajectory out;
  out.times = emission_times(len, cfg.emit_stride);
  out.states.resize(static_cast<long>(out.times.size()), diag.v_out.rows());
  if (len == 0) return out;

  if (cfg.mode == RunMode::Kernel) {
    if (!diag.measure.is_scaled()) {
      const KernelMatrix k = build_kernel(diag, len, cfg.alpha);
      const CRowMat run = kernel_running_states(k, signal, diag.b_tilde);
      for (std::size_t e = 0; e < out.times.size(); ++e)
        out.states.row(static_cast<long>(e)) = (diag.v_out * run.row(out.times[e] - 1).transpose()).real().transpose();
    } else {
      for (std::size_t e = 0; e < out.times.size(); ++e)
        out.states.row(static_cast<long>(e)) = kernel_final(diag, signal.first(out.times[e]), cfg.alpha).transpose();
    }
  } else {
    CRowMat trace;
    kernels::diagonal_scan(diag.lambdas, diag.b_tilde, signal, diag.measure, cfg.alpha, cfg.emit_stride, &trace);
    out.states = (trace * diag.v_out.transpose()).real();
  }
  if (!out.states.allFinite()) throw NumericalError("diagonal run produced non-finite states");
  return out;
}

KernelMatrix build_kernel(const DiagonalSSM& diag, long length, double alpha) {
  KernelMatrix k;
  k.measure = diag.measure;
  k.alpha = alpha;
  k.entries = kernels::kernel_rows(diag.lambdas, length, diag.measure, alpha, kKernelTailTolerance);
  k.effective_length = length;
  if (!diag.measure.is_scaled()) {
    long first = length;
    for (long i = 0; i < k.entries.rows(); ++i)
      for (long j = 0; j < first; ++j)
        if (k.entries(i, j) != std::complex<double>(0.0)) {
          first = j;
          break;
        }
    k.effective_length = length - first;
  }
  return k;
}

Vec apply_kernel(const KernelMatrix& kernel, std::span<const double> signal, const CVec& b_tilde, const CMat& v_out) {
  if (static_cast<long>(signal.size()) != kernel.length())
    throw ConfigError("apply_kernel: signal length " + std::to_string(signal.size()) + " differs from kernel length " +
                      std::to_string(kernel.length()));
  if (b_tilde.size() != kernel.entries.rows() || v_out.cols() != kernel.entries.rows())
    throw ConfigError("apply_kernel: mode count mismatch");
  const Eigen::Map<const Vec> u(signal.data(), kernel.length());
  const CVec modal = kernel.entries * u.cast<std::complex<double>>();
  return (v_out * b_tilde.cwiseProduct(modal)).real();
}

namespace {

CRowMat geometric_rows(const KernelMatrix& kernel) {
  if (kernel.measure.is_scaled()) throw ConfigError("running kernel states need a translated measure");
  return kernel.entries.rowwise().reverse();
}

}  // namespace

CRowMat kernel_running_states(const KernelMatrix& kernel, std::span<const double> signal, const CVec& b_tilde) {
  const CRowMat conv = causal_convolve_rows(geometric_rows(kernel), signal);
  return (b_tilde.asDiagonal() * conv).transpose();
}

CRowMat kernel_running_states_direct(const KernelMatrix& kernel, std::span<const double> signal, const CVec& b_tilde) {
  const CRowMat conv = causal_convolve_rows_direct(geometric_rows(kernel), signal);
  return (b_tilde.asDiagonal() * conv).transpose();
}

Mat dense_kernel(const SSMOperator& ssm, long length, double alpha) {
  if (ssm.measure.is_scaled()) throw ConfigError("dense_kernel needs a translated operator");
  const long n = ssm.n();
  const double th = static_cast<double>(ssm.measure.theta);
  Eigen::PartialPivLU<Mat> lu(Mat::Identity(n, n) + (alpha / th) * ssm.a);
  const Mat m = lu.solve(Mat::Identity(n, n) - ((1.0 - alpha) / th) * ssm.a);
  Mat k(n, length);
  if (length == 0) return k;
  k.col(length - 1) = lu.solve(ssm.b / th);
  for (long j = length - 2; j >= 0; --j) k.col(j).noalias() = m * k.col(j + 1);
  return k;
}

Vec resample(const Eigen::Ref<const Vec>& grid_values, long count) {
  const long L = grid_values.size();
  Vec out(count);
  if (count == 1) {
    out(0) = grid_values(L - 1);
    return out;
  }
  const double scale = static_cast<double>(L - 1) / static_cast<double>(count - 1);
  for (long s = 0; s < count; ++s) {
    const double pos = static_cast<double>(s) * scale;
    const long i = std::min(static_cast<long>(pos), L - 2);
    const double f = pos - static_cast<double>(i);
    out(s) = (1.0 - f) * grid_values(i) + f * grid_values(i + 1);
  }
  return out;
}

namespace {

long window_count(const Measure& m, long T) {
  if (T < 1) throw ConfigError("reconstruction needs T >= 1");
  if (m.is_scaled()) return T;
  if (T < m.theta)
    throw ConfigError("translated reconstruction needs T >= theta (T=" + std::to_string(T) +
                      ", theta=" + std::to_string(m.theta) + ")");
  return m.theta;
}

}  // namespace

Vec reconstruct(const Vec& c, const Frame& frame, const DualFrame& dual, const Measure& m, long T) {
  if (c.size() != frame.n_full() || dual.rows.rows() != frame.n_full())
    throw ConfigError("reconstruct: coefficient/frame size mismatch");
  return resample(synthesize(dual, c), window_count(m, T));
}

Reconstructor::Reconstructor(const DualFrame& dual) : synthesis_(dual.rows.transpose()) {}
Reconstructor::Reconstructor(const SpanOperator& span) : synthesis_(span.synthesis) {}
Reconstructor::Reconstructor(Mat grid_synthesis) : synthesis_(std::move(grid_synthesis)) {}

Vec Reconstructor::window(const Eigen::Ref<const Vec>& c, const Measure& m, long T) const {
  if (c.size() != synthesis_.cols()) throw ConfigError("reconstruct: coefficient size mismatch");
  return resample(grid(c), window_count(m, T));
}

}  // namespace walrus
