#pragma once

#include "walrus/analysis.hpp"
#include "walrus/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace walrus {

// One comparison method, ready to run. The operator works in its own
// coordinates: span coordinates for wavelet frames, basis coefficients for the
// Legendre/Fourier baselines.
struct MethodModel {
  std::string name;  // walrus, legs, legt, fous, fout
  SSMOperator op;
  std::optional<DiagonalSSM> diag;  // present when stably diagonalizable
  double cond_v = 0.0;
  Reconstructor rec;
  Mat ortho;  // op coordinates -> orthonormal function coordinates
  long rank = 0;
  std::string note;

  long n() const { return op.n(); }
};

// Baselines get n_baseline states (0: use the wavelet rank). Wavelet
// models keep cfg.n_eff modes (0: all rank_eff modes).
MethodModel build_method(const std::string& name, const ExperimentConfig& cfg, long n_baseline = 0);
std::vector<MethodModel> build_methods(const ExperimentConfig& cfg, const std::vector<std::string>& names);

StateTrajectory run_method(const MethodModel& m, std::span<const double> u, const RunConfig& run);

struct Instance {
  SignalInstance clean;
  std::vector<double> input;  // clean plus noise
};

// Instance i uses seeds drawn in order from SplitMix64(cfg.seed): signal seed, then noise seed.
std::vector<Instance> make_instances(const ExperimentConfig& cfg);

struct MseBench {
  std::vector<std::string> methods;
  std::vector<std::string> measures;
  std::vector<std::vector<double>> overall;  // [method][instance]
  WinTally wins;
  std::vector<MseReport> running;            // per method
};

// Scaled: overall = MSE of the final reconstruction over the whole input.
// Translated: overall = mean running MSE over steps with T >= theta.
MseBench bench_mse(const ExperimentConfig& cfg, const std::vector<MethodModel>& models,
                   const std::vector<Instance>& instances);

struct PeakBench {
  std::vector<std::string> methods;
  std::vector<std::string> measures;
  std::vector<std::vector<PeakReport>> reports;  // [method][instance]
  WinTally wins;
};

// Reconstruction used for detection: final scaled reconstruction, or the
// concatenation of translated windows ending at theta, 2 theta, ...
std::vector<double> detection_signal(const MethodModel& m, std::span<const double> u, const RunConfig& run);
PeakBench bench_peaks(const ExperimentConfig& cfg, const std::vector<MethodModel>& models,
                      const std::vector<Instance>& instances);

struct PeakSummary {
  double missed_pct, false_pct, wins_pct, rel_amp_err_pct, avg_displacement;
};
PeakSummary summarize_peaks(const PeakBench& b, std::size_t method);

struct KernelResult {
  std::string method;
  Mat kernel;  // orthonormal coordinates x samples
  KernelDiagnostics diag;
};
KernelResult kernel_for(const MethodModel& m, long length, long window, double alpha);

// CSV writers
void write_mse_tables(const std::string& dir, const ExperimentConfig& cfg, const MseBench& b);
void write_peak_table(const std::string& dir, const ExperimentConfig& cfg, const PeakBench& b);
void write_kernel_outputs(const std::string& dir, const ExperimentConfig& cfg, const std::vector<KernelResult>& ks);
// Sidecar: the serialized config followed by '#' notes.
void write_metadata(const std::string& csv_path, const ExperimentConfig& cfg, const std::vector<std::string>& notes);

std::vector<std::string> standard_notes();

}  // namespace walrus
