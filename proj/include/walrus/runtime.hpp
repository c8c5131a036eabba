#pragma once

#include "walrus/dual.hpp"
#include "walrus/safari.hpp"
#include "walrus/spectral.hpp"

#include <span>
#include <vector>

namespace walrus {

enum class RunMode { DenseSequential, DiagonalSequential, Kernel };

std::string run_mode_name(RunMode m);
RunMode parse_run_mode(const std::string& s);

struct RunConfig {
  double alpha = 0.5;
  RunMode mode = RunMode::DiagonalSequential;
  long emit_stride = 1;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

struct StateTrajectory {
  std::vector<long> times;  // samples consumed at each emission (1-based end of the window)
  Mat states;               // emissions x N

  Vec final_state() const { return states.row(states.rows() - 1).transpose(); }
};

// Sample counts at which a run of length n emits: every stride, plus the end.
std::vector<long> emission_times(long n, long stride);

// One GBT step from sample k: c+ = (I + dt a A_{k+1})^{-1} [(I - dt (1-a) A_k) c + dt B_k u_k].
Vec gbt_step_dense(const SSMOperator& ssm, const Vec& c, double u_k, long k, double alpha, double dt = 1.0);

// Dense runs: scaled operators are reduced to Hessenberg form once, so each
// step costs O(N^2); translated operators reuse a single LU factorization.
StateTrajectory run_sequential(const SSMOperator& ssm, std::span<const double> signal, const RunConfig& cfg);
// Diagonal runs map the modal state back through v_out before emission. Kernel
// mode emits only the final state for scaled measures; translated measures get
// the full running trajectory from FFT convolution.
StateTrajectory run_sequential(const DiagonalSSM& diag, std::span<const double> signal, const RunConfig& cfg);

constexpr double kKernelTailTolerance = 1e-12;

struct KernelMatrix {
  CRowMat entries;  // n_modes x length
  Measure measure;
  double alpha = 0.5;
  long effective_length = 0;  // translated: columns that survive tail truncation

  long length() const { return entries.cols(); }
};

KernelMatrix build_kernel(const DiagonalSSM& diag, long length, double alpha);
// c_final = Re(v_out diag(b_tilde) K u)
Vec apply_kernel(const KernelMatrix& kernel, std::span<const double> signal, const CVec& b_tilde, const CMat& v_out);
// Modal running states (row T-1 = state after T samples) of a translated kernel,
// via FFT convolution of each geometric row with the input.
CRowMat kernel_running_states(const KernelMatrix& kernel, std::span<const double> signal, const CVec& b_tilde);
// Same quantity from the kernel by direct convolution; reference for tests.
CRowMat kernel_running_states_direct(const KernelMatrix& kernel, std::span<const double> signal, const CVec& b_tilde);

// Coefficient-space kernel of a dense translated operator: column j is the
// contribution of an impulse at sample j to the state after `length` samples.
// Works for operators that cannot be diagonalized.
Mat dense_kernel(const SSMOperator& ssm, long length, double alpha);

// Linear interpolation of a grid function (endpoint grid on [0,1]) onto
// `count` equally spaced samples over the same interval.
Vec resample(const Eigen::Ref<const Vec>& grid_values, long count);

// Reconstruction of the represented window after T samples: scaled covers
// samples [0, T), translated covers [T - theta, T).
Vec reconstruct(const Vec& c, const Frame& frame, const DualFrame& dual, const Measure& m, long T);

// Precomputed coefficient -> grid synthesis for repeated reconstructions.
class Reconstructor {
public:
  // c are frame coefficients; synthesis = dual^T.
  Reconstructor(const DualFrame& dual);
  // c are span coordinates of `span`.
  Reconstructor(const SpanOperator& span);
  explicit Reconstructor(Mat grid_synthesis);
  Reconstructor() = default;

  Vec grid(const Eigen::Ref<const Vec>& c) const { return synthesis_ * c; }
  Vec window(const Eigen::Ref<const Vec>& c, const Measure& m, long T) const;
  long dim() const { return synthesis_.cols(); }

private:
  Mat synthesis_;  // L x dim
};

}  // namespace walrus
