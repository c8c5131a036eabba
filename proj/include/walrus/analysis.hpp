#pragma once

#include "walrus/runtime.hpp"
#include "walrus/signals.hpp"

#include <string>
#include <vector>

namespace walrus {

double overall_mse(std::span<const double> u, std::span<const double> u_hat);

// MSE of the reconstructed window against the true samples at every emission.
std::vector<double> running_mse(const StateTrajectory& traj, const Reconstructor& rec, std::span<const double> signal,
                                const Measure& m);
std::vector<double> running_mse(const StateTrajectory& traj, const Frame& frame, const DualFrame& dual,
                                std::span<const double> signal, const Measure& m);

struct MseReport {
  double overall = 0.0;                  // mean of per-instance overall MSE
  std::vector<long> steps;
  std::vector<double> q40, median, q60;  // across instances, per step
};

// Linear-interpolated quantile of unsorted data, q in [0,1].
double quantile(std::vector<double> v, double q);
// runs[instance][step]; every run must have the same length.
MseReport summarize_running(const std::vector<std::vector<double>>& runs, const std::vector<long>& steps,
                            const std::vector<double>& overall);

struct PeakDetector {
  std::vector<long> scales{64, 128};  // center box widths, finest first
  double threshold_k = 1.0;
  int persistence = 2;
  long width = 100;                   // amplitude search half-window
  double relative_floor = 0.1;        // threshold never below this fraction of max |d|
  bool positive_only = true;          // signed maxima (pulses of one polarity)

  void validate() const;
  bool operator==(const PeakDetector&) const = default;
};

// Undecimated Haar-family detail: mean over a centered box of width s minus the
// mean of the two flanking boxes of width s/2.
std::vector<double> haar_detail(std::span<const double> x, long s);

std::vector<Event> detect_peaks(std::span<const double> signal, const PeakDetector& det);

struct PeakMatch {
  long truth_pos;
  long det_pos;
  double truth_amp;
  double det_amp;
};

struct PeakReport {
  long truths = 0;
  long detections = 0;
  long missed = 0;
  long false_peaks = 0;
  std::vector<PeakMatch> matches;
  double avg_displacement = 0.0;
  double rel_amp_error = 0.0;
};

PeakReport match_peaks(const std::vector<Event>& detected, const std::vector<Event>& truth, long tol_window);

struct WinTally {
  std::vector<std::string> methods;
  std::vector<long> wins;
  std::vector<double> percent;
  long instances = 0;
};

// by_method[m][i]: method m on instance i. Wins when missed <= every other method.
WinTally tally_wins(const std::vector<std::string>& methods, const std::vector<std::vector<PeakReport>>& by_method);
// Lowest MSE wins; ties award every tied method.
WinTally tally_wins(const std::vector<std::string>& methods, const std::vector<std::vector<double>>& by_method);

constexpr double kDeadZoneThreshold = 1e-6;

struct KernelDiagnostics {
  double out_of_window_energy_ratio = 0.0;
  std::vector<long> dead_zone_front;
  std::vector<long> dead_zone_back;

  double mean_dead_zone() const;
};

// Rows are states, columns input samples; the window is the last W columns.
KernelDiagnostics kernel_diagnostics(const Mat& kernel, long window_W);
// Modal kernel; magnitudes of the complex entries are used.
KernelDiagnostics kernel_diagnostics(const KernelMatrix& kernel, long window_W);

}  // namespace walrus
