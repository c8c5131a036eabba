#include "walrus/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <limits>

namespace walrus {

namespace {

bool is_baseline(const std::string& n) { return n == "legs" || n == "legt" || n == "fous" || n == "fout"; }

long wavelet_rank(const ExperimentConfig& cfg) {
  const Frame f = build_wavelet_frame(cfg.frame);
  return dual_frame(f, cfg.frame.rcond).rank_eff;
}

void attach_diagonal(MethodModel& m, long keep) {
  const Eigendecomposition e = diagonalize(m.op);
  m.cond_v = e.cond_v;
  if (!e.stable()) {
    m.note = m.name + ": cond(V)=" + std::to_string(e.cond_v) + " above threshold, runs dense";
    return;
  }
  if (keep <= 0 || keep == m.n()) {
    m.diag = full_diagonal(e, Mat::Identity(m.n(), m.n()));
    return;
  }
  // Reduced modal model in op coordinates; norms through the orthonormal map.
  const Vec norms = (m.ortho.cast<std::complex<double>>() * e.vectors).colwise().norm().transpose();
  const auto idx = select_modes(e, norms, keep);
  DiagonalSSM d = full_diagonal(e, Mat::Identity(m.n(), m.n()));
  DiagonalSSM r;
  r.measure = d.measure;
  r.cond_v = d.cond_v;
  r.n_eff = keep;
  r.lambdas.resize(keep);
  r.b_tilde.resize(keep);
  r.v_out.resize(m.n(), keep);
  for (long k = 0; k < keep; ++k) {
    r.lambdas(k) = d.lambdas(idx[k]);
    r.b_tilde(k) = d.b_tilde(idx[k]);
    r.v_out.col(k) = d.v_out.col(idx[k]);
  }
  m.diag = std::move(r);
}

}  // namespace

MethodModel build_method(const std::string& name, const ExperimentConfig& cfg, long n_baseline) {
  MethodModel m;
  m.name = name;
  const long theta = cfg.measure.theta > 0 ? cfg.measure.theta : cfg.dataset.length;
  if (name == "walrus") {
    if (cfg.frame.family != Family::Daubechies) throw ConfigError("walrus needs a Daubechies frame config");
    const Frame f = build_wavelet_frame(cfg.frame);
    const DualFrame d = dual_frame(f, cfg.frame.rcond);
    const RowMat df = frame_derivative(f);
    const SpanOperator sp = build_span_ssm(f, d, df, cfg.measure);
    m.op = sp.op;
    m.rec = Reconstructor(sp);
    m.ortho = sp.sigma.cwiseInverse().asDiagonal();
    m.rank = d.rank_eff;
    if (cfg.n_eff > d.rank_eff)
      throw ConfigError("model.n_eff=" + std::to_string(cfg.n_eff) + " exceeds rank_eff=" + std::to_string(d.rank_eff));
    attach_diagonal(m, cfg.n_eff);
    return m;
  }
  if (!is_baseline(name)) throw ConfigError("unknown method '" + name + "' (expected walrus, legs, legt, fous, fout)");
  const long n = n_baseline > 0 ? n_baseline : (cfg.frame.family == Family::Daubechies ? wavelet_rank(cfg) : cfg.frame.basis_n);
  const HippoKind kind = parse_hippo(name);
  m.op = build_hippo_closed_form(kind, n, theta);
  FrameSpec bs;
  bs.family = (kind == HippoKind::LegS || kind == HippoKind::LegT) ? Family::Legendre : Family::Fourier;
  bs.basis_n = static_cast<int>(n);
  bs.grid_len = cfg.frame.grid_len;
  const Frame bf = build_basis_frame(bs);
  m.rec = Reconstructor(Mat(bf.rows.transpose()));
  m.ortho = Mat::Identity(n, n);
  m.rank = n;
  attach_diagonal(m, 0);
  return m;
}

std::vector<MethodModel> build_methods(const ExperimentConfig& cfg, const std::vector<std::string>& names) {
  long rank = 0;
  for (const auto& n : names)
    if (n == "walrus") rank = -1;
  std::vector<MethodModel> out;
  for (const auto& n : names) {
    out.push_back(build_method(n, cfg, rank > 0 ? rank : 0));
    if (n == "walrus") rank = out.back().diag ? out.back().diag->n_eff : out.back().n();
  }
  // Baselines listed before walrus still get the wavelet's size.
  for (auto& m : out)
    if (rank > 0 && m.name != "walrus" && m.n() != rank) m = build_method(m.name, cfg, rank);
  return out;
}

StateTrajectory run_method(const MethodModel& m, std::span<const double> u, const RunConfig& run) {
  if (run.mode == RunMode::DenseSequential || !m.diag) return run_sequential(m.op, u, run);
  return run_sequential(*m.diag, u, run);
}

std::vector<Instance> make_instances(const ExperimentConfig& cfg) {
  std::vector<Instance> out;
  SplitMix64 master(cfg.seed);
  for (long i = 0; i < cfg.instances; ++i) {
    Instance inst;
    const std::uint64_t sig_seed = master.next(), noise_seed = master.next();
    if (!cfg.dataset_path.empty()) {
      inst.clean = load_csv(cfg.dataset_path, cfg.dataset_column);
    } else {
      GeneratorSpec g = cfg.dataset;
      g.seed = sig_seed;
      inst.clean = generate(g);
    }
    inst.input = add_noise(inst.clean, cfg.noise, noise_seed).samples;
    out.push_back(std::move(inst));
  }
  return out;
}

MseBench bench_mse(const ExperimentConfig& cfg, const std::vector<MethodModel>& models,
                   const std::vector<Instance>& instances) {
  MseBench b;
  const auto nm = models.size(), ni = instances.size();
  b.overall.assign(nm, std::vector<double>(ni, 0.0));
  std::vector<std::vector<std::vector<double>>> runs(nm, std::vector<std::vector<double>>(ni));
  std::vector<std::vector<long>> steps(nm);
  for (const auto& m : models) {
    b.methods.push_back(m.name);
    b.measures.push_back(m.op.measure.name());
  }

  for (std::size_t k = 0; k < nm; ++k) {
    const MethodModel& m = models[k];
    const Measure meas = m.op.measure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < ni; ++i) {
      const auto& u = instances[i].input;
      const StateTrajectory t = run_method(m, u, cfg.run);
      std::vector<double> r;
      std::vector<long> st;
      for (std::size_t e = 0; e < t.times.size(); ++e) {
        if (!meas.is_scaled() && t.times[e] < meas.theta) continue;
        const Vec hat = m.rec.window(t.states.row(static_cast<long>(e)).transpose(), meas, t.times[e]);
        const long first = meas.is_scaled() ? 0 : t.times[e] - meas.theta;
        r.push_back(overall_mse(std::span<const double>(u).subspan(first, hat.size()),
                                std::span<const double>(hat.data(), hat.size())));
        st.push_back(t.times[e]);
      }
      if (r.empty()) throw ConfigError("no emission reaches the translated window; lengthen the signal");
      double overall = r.back();
      if (!meas.is_scaled()) {
        overall = 0.0;
        for (double v : r) overall += v;
        overall /= static_cast<double>(r.size());
      }
      b.overall[k][i] = overall;
      runs[k][i] = std::move(r);
      if (i == 0) steps[k] = std::move(st);
    }
    b.running.push_back(summarize_running(runs[k], steps[k], b.overall[k]));
  }
  b.wins = tally_wins(b.methods, b.overall);
  return b;
}

std::vector<double> detection_signal(const MethodModel& m, std::span<const double> u, const RunConfig& run) {
  const long n = static_cast<long>(u.size());
  const Measure meas = m.op.measure;
  RunConfig r = run;
  if (meas.is_scaled()) {
    r.emit_stride = n;
    const StateTrajectory t = run_method(m, u, r);
    const Vec hat = m.rec.window(t.final_state(), meas, n);
    return {hat.data(), hat.data() + hat.size()};
  }
  if (n < meas.theta) throw ConfigError("signal shorter than the translated window");
  r.emit_stride = meas.theta;
  const StateTrajectory t = run_method(m, u, r);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t e = 0; e < t.times.size(); ++e) {
    const long T = t.times[e];
    if (T < meas.theta) continue;
    const Vec hat = m.rec.window(t.states.row(static_cast<long>(e)).transpose(), meas, T);
    // Only the part not already covered by the previous window.
    const long fresh = T - static_cast<long>(out.size());
    out.insert(out.end(), hat.data() + (meas.theta - fresh), hat.data() + meas.theta);
  }
  return out;
}

PeakBench bench_peaks(const ExperimentConfig& cfg, const std::vector<MethodModel>& models,
                      const std::vector<Instance>& instances) {
  PeakBench b;
  const auto nm = models.size(), ni = instances.size();
  b.reports.assign(nm, std::vector<PeakReport>(ni));
  const long tol = cfg.peak_tolerance > 0 ? cfg.peak_tolerance : cfg.dataset.width;
  for (const auto& m : models) {
    b.methods.push_back(m.name);
    b.measures.push_back(m.op.measure.name());
  }
  for (std::size_t k = 0; k < nm; ++k) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < ni; ++i) {
      const auto rec = detection_signal(models[k], instances[i].input, cfg.run);
      const auto det = detect_peaks(rec, cfg.peaks);
      b.reports[k][i] = match_peaks(det, instances[i].clean.events, tol);
    }
  }
  b.wins = tally_wins(b.methods, b.reports);
  return b;
}

PeakSummary summarize_peaks(const PeakBench& b, std::size_t k) {
  PeakSummary s{};
  long truths = 0, missed = 0, falses = 0, matches = 0;
  double disp = 0.0, amp = 0.0;
  for (const auto& r : b.reports[k]) {
    truths += r.truths;
    missed += r.missed;
    falses += r.false_peaks;
    for (const auto& m : r.matches) {
      disp += static_cast<double>(std::abs(m.truth_pos - m.det_pos));
      amp += std::abs(m.det_amp - m.truth_amp) / std::abs(m.truth_amp);
      ++matches;
    }
  }
  s.missed_pct = truths ? 100.0 * static_cast<double>(missed) / static_cast<double>(truths) : 0.0;
  s.false_pct = truths ? 100.0 * static_cast<double>(falses) / static_cast<double>(truths) : 0.0;
  s.wins_pct = b.wins.percent[k];
  s.rel_amp_err_pct = matches ? 100.0 * amp / static_cast<double>(matches) : 0.0;
  s.avg_displacement = matches ? disp / static_cast<double>(matches) : 0.0;
  return s;
}

KernelResult kernel_for(const MethodModel& m, long length, long window, double alpha) {
  KernelResult r;
  r.method = m.name;
  if (m.diag && m.diag->n_eff < m.n()) {
    // Reduced model: coefficient kernel of the kept modes only.
    const KernelMatrix k = build_kernel(*m.diag, length, alpha);
    const CMat c = m.diag->v_out * m.diag->b_tilde.asDiagonal() * k.entries;
    r.kernel = m.ortho * c.real();
  } else {
    r.kernel = m.ortho * dense_kernel(m.op, length, alpha);
  }
  r.diag = kernel_diagnostics(r.kernel, window);
  return r;
}

namespace {

std::ofstream csv(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  os.precision(12);
  return os;
}

}  // namespace

std::vector<std::string> standard_notes() {
  return {
      "quadrature: trapezoid weights on the endpoint grid t_k = k/(L-1)",
      "scaled step k uses A/(k+1), B/(k+1); A_{k+1} = A/(k+2); step 0 divisor 1",
      "translated warm-up: stepped from c=0 with the full-theta operator; windows reported for T >= theta",
      "wavelet models run in span coordinates of the rcond-truncated dual",
      "noise: variance = dataset.noise * mean signal power",
      "prng: SplitMix64; instance i draws signal seed then noise seed from SplitMix64(experiment.seed)",
      "version: walrus 1.0.0",
  };
}

void write_metadata(const std::string& csv_path, const ExperimentConfig& cfg, const std::vector<std::string>& notes) {
  std::ofstream os(csv_path + ".meta");
  if (!os) throw FormatError("cannot write " + csv_path + ".meta");
  os << serialize_config(cfg);
  for (const auto& n : notes) os << "# " << n << '\n';
}

void write_mse_tables(const std::string& dir, const ExperimentConfig& cfg, const MseBench& b) {
  std::filesystem::create_directories(dir);
  const std::string table = dir + "/mse_table.csv";
  {
    auto os = csv(table);
    os << "method,measure,wins_pct,mean_mse,median_mse\n";
    for (std::size_t k = 0; k < b.methods.size(); ++k)
      os << b.methods[k] << ',' << b.measures[k] << ',' << b.wins.percent[k] << ','
         << b.running[k].overall << ',' << quantile(b.overall[k], 0.5) << '\n';
  }
  write_metadata(table, cfg, standard_notes());
  const std::string inst = dir + "/mse_instances.csv";
  {
    auto os = csv(inst);
    os << "instance";
    for (const auto& m : b.methods) os << ',' << m;
    os << '\n';
    for (std::size_t i = 0; i < b.overall[0].size(); ++i) {
      os << i;
      for (const auto& v : b.overall) os << ',' << v[i];
      os << '\n';
    }
  }
  write_metadata(inst, cfg, standard_notes());
  for (std::size_t k = 0; k < b.methods.size(); ++k) {
    const std::string p = dir + "/running_mse_" + b.methods[k] + ".csv";
    auto os = csv(p);
    os << "step,q40,median,q60\n";
    const MseReport& r = b.running[k];
    for (std::size_t s = 0; s < r.steps.size(); ++s)
      os << r.steps[s] << ',' << r.q40[s] << ',' << r.median[s] << ',' << r.q60[s] << '\n';
    os.close();
    write_metadata(p, cfg, standard_notes());
  }
}

void write_peak_table(const std::string& dir, const ExperimentConfig& cfg, const PeakBench& b) {
  std::filesystem::create_directories(dir);
  const std::string p = dir + "/peaks_table.csv";
  {
    auto os = csv(p);
    os << "method,measure,peaks_missed_pct,false_peaks_pct,wins_pct,rel_amp_err_pct,avg_displacement\n";
    for (std::size_t k = 0; k < b.methods.size(); ++k) {
      const PeakSummary s = summarize_peaks(b, k);
      os << b.methods[k] << ',' << b.measures[k] << ',' << s.missed_pct << ',' << s.false_pct
         << ',' << s.wins_pct << ',' << s.rel_amp_err_pct << ',' << s.avg_displacement << '\n';
    }
  }
  write_metadata(p, cfg, standard_notes());
}

void write_kernel_outputs(const std::string& dir, const ExperimentConfig& cfg, const std::vector<KernelResult>& ks) {
  std::filesystem::create_directories(dir);
  const std::string dp = dir + "/kernel_diagnostics.csv";
  {
    auto os = csv(dp);
    os << "method,window,out_of_window_energy_ratio,mean_dead_zone_front,mean_dead_zone_back\n";
    for (const auto& k : ks) {
      double f = 0.0, b = 0.0;
      for (std::size_t i = 0; i < k.diag.dead_zone_front.size(); ++i) {
        f += static_cast<double>(k.diag.dead_zone_front[i]);
        b += static_cast<double>(k.diag.dead_zone_back[i]);
      }
      const auto rows = static_cast<double>(std::max<std::size_t>(1, k.diag.dead_zone_front.size()));
      os << k.method << ',' << cfg.kernel_window << ',' << k.diag.out_of_window_energy_ratio << ',' << f / rows << ','
         << b / rows << '\n';
    }
  }
  write_metadata(dp, cfg, standard_notes());
  for (const auto& k : ks) {
    // Max |K| over column blocks, for plotting.
    const long cols = k.kernel.cols(), blocks = std::min(cfg.kernel_plot_columns, cols);
    const std::string p = dir + "/kernel_" + k.method + ".csv";
    auto os = csv(p);
    os << "row,col_start,col_end,magnitude\n";
    for (long i = 0; i < k.kernel.rows(); ++i)
      for (long b = 0; b < blocks; ++b) {
        const long a = b * cols / blocks, e = (b + 1) * cols / blocks;
        os << i << ',' << a << ',' << e << ',' << k.kernel.row(i).segment(a, e - a).cwiseAbs().maxCoeff() << '\n';
      }
    os.close();
    write_metadata(p, cfg, standard_notes());
  }
}

}  // namespace walrus
