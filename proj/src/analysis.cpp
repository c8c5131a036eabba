#include "walrus/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace walrus {

double overall_mse(std::span<const double> u, std::span<const double> u_hat) {
  if (u.size() != u_hat.size()) throw ConfigError("overall_mse: length mismatch");
  if (u.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += (u[k] - u_hat[k]) * (u[k] - u_hat[k]);
  return acc / static_cast<double>(u.size());
}

std::vector<double> running_mse(const StateTrajectory& traj, const Reconstructor& rec, std::span<const double> signal,
                                const Measure& m) {
  std::vector<double> out;
  out.reserve(traj.times.size());
  for (std::size_t e = 0; e < traj.times.size(); ++e) {
    const long T = traj.times[e];
    if (T > static_cast<long>(signal.size())) throw ConfigError("running_mse: trajectory longer than signal");
    const Vec hat = rec.window(traj.states.row(static_cast<long>(e)).transpose(), m, T);
    const long first = m.is_scaled() ? 0 : T - m.theta;
    out.push_back(overall_mse(signal.subspan(first, hat.size()), std::span<const double>(hat.data(), hat.size())));
  }
  return out;
}

std::vector<double> running_mse(const StateTrajectory& traj, const Frame& frame, const DualFrame& dual,
                                std::span<const double> signal, const Measure& m) {
  if (traj.states.cols() != frame.n_full()) throw ConfigError("running_mse: state size differs from frame size");
  return running_mse(traj, Reconstructor(dual), signal, m);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ConfigError("quantile of empty data");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double f = pos - static_cast<double>(i);
  return v[i] + f * (v[i + 1] - v[i]);
}

MseReport summarize_running(const std::vector<std::vector<double>>& runs, const std::vector<long>& steps,
                            const std::vector<double>& overall) {
  MseReport r;
  r.steps = steps;
  if (!overall.empty()) {
    for (double v : overall) r.overall += v;
    r.overall /= static_cast<double>(overall.size());
  }
  if (runs.empty()) return r;
  const std::size_t n = runs[0].size();
  if (n != steps.size()) throw ConfigError("summarize_running: step count mismatch");
  std::vector<double> col(runs.size());
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].size() != n) throw ConfigError("summarize_running: ragged runs");
      col[i] = runs[i][s];
    }
    r.q40.push_back(quantile(col, 0.4));
    r.median.push_back(quantile(col, 0.5));
    r.q60.push_back(quantile(col, 0.6));
  }
  return r;
}

void PeakDetector::validate() const {
  if (scales.empty()) throw ConfigError("peaks.scales must not be empty");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 2) throw ConfigError("peaks.scales entries must be >= 2");
    if (i > 0 && scales[i] <= scales[i - 1]) throw ConfigError("peaks.scales must increase");
  }
  if (!(threshold_k >= 0.0)) throw ConfigError("peaks.threshold_k must be >= 0");
  if (persistence < 1 || persistence > static_cast<int>(scales.size()))
    throw ConfigError("peaks.persistence must lie in 1..number of scales");
  if (width < 0) throw ConfigError("peaks.width must be >= 0");
}

std::vector<double> haar_detail(std::span<const double> x, long s) {
  const long n = static_cast<long>(x.size());
  const long h = s / 2;
  // Summation order depends only on values, so shifted inputs give shifted outputs exactly.
  auto box = [&](long a, long b) {
    a = std::clamp(a, 0L, n);
    b = std::clamp(b, 0L, n);
    if (b <= a) return 0.0;
    double acc = 0.0;
    for (long k = a; k < b; ++k) acc += x[k];
    return acc / static_cast<double>(b - a);
  };
  std::vector<double> d(n);
  for (long i = 0; i < n; ++i) {
    const long a = i - h, b = i - h + s;
    // A flank cut off by the boundary is replaced by the other one.
    const bool left = a - h >= 0, right = b + h <= n;
    double flank = 0.5 * (box(a - h, a) + box(b, b + h));
    if (left != right) flank = left ? box(a - h, a) : box(b, b + h);
    d[i] = box(a, b) - flank;
  }
  return d;
}

namespace {

double median_of(std::vector<double> v) { return quantile(std::move(v), 0.5); }

// Local maxima above thr; flat tops report their midpoint.
std::vector<long> maxima(const std::vector<double>& d, double thr) {
  std::vector<long> out;
  const long n = static_cast<long>(d.size());
  long i = 1;
  while (i + 1 < n) {
    if (d[i] > d[i - 1] && d[i] > thr) {
      long j = i;
      while (j + 1 < n && d[j + 1] == d[i]) ++j;
      if (j + 1 < n && d[j + 1] < d[i]) out.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<Event> detect_peaks(std::span<const double> signal, const PeakDetector& det) {
  det.validate();
  const long n = static_cast<long>(signal.size());
  if (n < 64) throw ConfigError("detect_peaks needs at least 64 samples");
  std::vector<std::vector<long>> per_scale;
  for (long s : det.scales) {
    std::vector<double> d = haar_detail(signal, s);
    if (!det.positive_only)
      for (double& v : d) v = std::abs(v);
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    if (dmax == 0.0) return {};
    const double med = median_of(d);
    std::vector<double> dev(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) dev[k] = std::abs(d[k] - med);
    const double sigma = 1.4826 * median_of(dev);
    const double thr = std::max(det.threshold_k * sigma, det.relative_floor * dmax);
    per_scale.push_back(maxima(d, thr));
  }

  // Chains ending on the same coarse maximum are one event, placed there.
  std::vector<long> anchors;
  for (long p : per_scale[0]) {
    int count = 1;
    long q = p;
    for (std::size_t j = 1; j < per_scale.size(); ++j) {
      long best = -1;
      for (long cand : per_scale[j])
        if (std::abs(cand - q) <= det.scales[j - 1] && (best < 0 || std::abs(cand - q) < std::abs(best - q)))
          best = cand;
      if (best < 0) break;
      q = best;
      ++count;
    }
    if (count < det.persistence) continue;
    if (std::find(anchors.begin(), anchors.end(), q) == anchors.end()) anchors.push_back(q);
  }
  std::sort(anchors.begin(), anchors.end());
  std::vector<Event> out;
  for (long p : anchors) {
    const long lo = std::max(0L, p - det.width), hi = std::min(n - 1, p + det.width);
    double amp = signal[lo];
    for (long k = lo; k <= hi; ++k)
      if (det.positive_only ? signal[k] > amp : std::abs(signal[k]) > std::abs(amp)) amp = signal[k];
    out.push_back({p, amp});
  }
  return out;
}

PeakReport match_peaks(const std::vector<Event>& detected, const std::vector<Event>& truth, long tol_window) {
  struct Pair {
    long dist;
    std::size_t t, d;
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < truth.size(); ++t)
    for (std::size_t d = 0; d < detected.size(); ++d) {
      const long dist = std::abs(detected[d].position - truth[t].position);
      if (dist <= tol_window) pairs.push_back({dist, t, d});
    }
  // Ascending distance; ties go to the earlier truth, then the earlier detection.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.t != b.t) return a.t < b.t;
    return a.d < b.d;
  });
  std::vector<bool> used_t(truth.size(), false), used_d(detected.size(), false);
  PeakReport r;
  r.truths = static_cast<long>(truth.size());
  r.detections = static_cast<long>(detected.size());
  for (const Pair& p : pairs) {
    if (used_t[p.t] || used_d[p.d]) continue;
    used_t[p.t] = used_d[p.d] = true;
    r.matches.push_back({truth[p.t].position, detected[p.d].position, truth[p.t].amplitude, detected[p.d].amplitude});
  }
  std::sort(r.matches.begin(), r.matches.end(),
            [](const PeakMatch& a, const PeakMatch& b) { return a.truth_pos < b.truth_pos; });
  const auto m = static_cast<long>(r.matches.size());
  r.missed = r.truths - m;
  r.false_peaks = r.detections - m;
  if (m > 0) {
    for (const auto& x : r.matches) {
      r.avg_displacement += static_cast<double>(std::abs(x.truth_pos - x.det_pos));
      r.rel_amp_error += std::abs(x.det_amp - x.truth_amp) / std::abs(x.truth_amp);
    }
    r.avg_displacement /= static_cast<double>(m);
    r.rel_amp_error /= static_cast<double>(m);
  }
  return r;
}

namespace {

WinTally finish_tally(const std::vector<std::string>& methods, std::vector<long> wins, long instances) {
  WinTally t;
  t.methods = methods;
  t.wins = std::move(wins);
  t.instances = instances;
  for (long w : t.wins)
    t.percent.push_back(instances > 0 ? 100.0 * static_cast<double>(w) / static_cast<double>(instances) : 0.0);
  return t;
}

template <class T>
long check_shape(const std::vector<std::string>& methods, const std::vector<std::vector<T>>& by_method) {
  if (methods.size() != by_method.size() || methods.empty()) throw ConfigError("tally_wins: method count mismatch");
  const std::size_t n = by_method[0].size();
  for (const auto& v : by_method)
    if (v.size() != n) throw ConfigError("tally_wins: methods cover different instance counts");
  return static_cast<long>(n);
}

}  // namespace

WinTally tally_wins(const std::vector<std::string>& methods, const std::vector<std::vector<PeakReport>>& by_method) {
  const long n = check_shape(methods, by_method);
  std::vector<long> wins(methods.size(), 0);
  for (long i = 0; i < n; ++i) {
    long best = std::numeric_limits<long>::max();
    for (const auto& m : by_method) best = std::min(best, m[i].missed);
    for (std::size_t k = 0; k < methods.size(); ++k) wins[k] += by_method[k][i].missed <= best;
  }
  return finish_tally(methods, std::move(wins), n);
}

WinTally tally_wins(const std::vector<std::string>& methods, const std::vector<std::vector<double>>& by_method) {
  const long n = check_shape(methods, by_method);
  std::vector<long> wins(methods.size(), 0);
  for (long i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : by_method) best = std::min(best, m[i]);
    for (std::size_t k = 0; k < methods.size(); ++k) wins[k] += by_method[k][i] == best;
  }
  return finish_tally(methods, std::move(wins), n);
}

double KernelDiagnostics::mean_dead_zone() const {
  if (dead_zone_front.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < dead_zone_front.size(); ++i)
    acc += static_cast<double>(dead_zone_front[i] + dead_zone_back[i]);
  return acc / static_cast<double>(dead_zone_front.size());
}

namespace {

KernelDiagnostics diagnose(const Eigen::Ref<const Mat>& mag, long W) {
  const long n = mag.rows(), L = mag.cols();
  if (W < 1 || W > L) throw ConfigError("kernel_diagnostics: window must lie in 1..kernel length");
  KernelDiagnostics d;
  const double total = mag.array().square().sum();
  const double outside = mag.leftCols(L - W).array().square().sum();
  d.out_of_window_energy_ratio = total > 0.0 ? outside / total : 0.0;
  for (long i = 0; i < n; ++i) {
    const double cut = kDeadZoneThreshold * mag.row(i).maxCoeff();
    long front = 0, back = 0;
    while (front < W && mag(i, L - W + front) < cut) ++front;
    while (back < W - front && mag(i, L - 1 - back) < cut) ++back;
    d.dead_zone_front.push_back(front);
    d.dead_zone_back.push_back(back);
  }
  return d;
}

}  // namespace

KernelDiagnostics kernel_diagnostics(const Mat& kernel, long window_W) { return diagnose(kernel.cwiseAbs(), window_W); }

KernelDiagnostics kernel_diagnostics(const KernelMatrix& kernel, long window_W) {
  return diagnose(kernel.entries.cwiseAbs(), window_W);
}

}  // namespace walrus
