#include "walrus/experiments.hpp"
#include "walrus/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace walrus;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string methods;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string input;
  std::string column;
  std::string method = "walrus";
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  if (out.empty()) throw ConfigError("--methods needs at least one method");
  return out;
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.methods.empty()) cfg.methods = split_list(o.methods);
  if (o.seed_set) cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

void print_notes(const std::vector<MethodModel>& ms) {
  for (const auto& m : ms)
    if (!m.note.empty()) std::cerr << "note: " << m.note << '\n';
}

int cmd_build(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const std::string dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  const Frame f = build_frame(cfg.frame);
  const DualFrame d = dual_frame(f, cfg.frame.rcond);
  const RowMat df = frame_derivative(f);
  save_frame(dir + "/frame.bin", f);
  save_dual(dir + "/dual.bin", d);

  // Redundant frames past a couple thousand rows are kept in span form only.
  SSMOperator op;
  const bool full = f.rows.rows() <= 2000;
  if (full)
    op = cfg.measure.is_scaled() ? build_scaled_ssm(f, d, df) : build_translated_ssm(f, d, df, cfg.measure.theta);
  else
    op = build_span_ssm(f, d, df, cfg.measure).op;
  save_ssm(dir + "/ssm.bin", op);

  const Eigendecomposition e = diagonalize(full ? build_span_ssm(f, d, df, cfg.measure).op : op);
  std::printf("frame %s\n", f.id.c_str());
  std::printf("n_full %ld\nrank_eff %ld\nssm_form %s\ncond_v %.6e\ndiagonalizable %s\n",
              static_cast<long>(f.rows.rows()), d.rank_eff, full ? "full" : "span", e.cond_v,
              e.stable() ? "yes" : "no");
  if (e.stable()) {
    const long keep = cfg.n_eff > 0 ? cfg.n_eff : d.rank_eff;
    if (keep > d.rank_eff) throw ConfigError("model.n_eff exceeds rank_eff=" + std::to_string(d.rank_eff));
    const SpanOperator sp = build_span_ssm(f, d, df, cfg.measure);
    save_diag(dir + "/diag.bin", reduce_to_effective(e, sp, keep));
    std::printf("n_eff %ld\n", keep);
  }
  return 0;
}

int cmd_bench_mse(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const auto models = build_methods(cfg, cfg.methods);
  print_notes(models);
  const auto inst = make_instances(cfg);
  const MseBench b = bench_mse(cfg, models, inst);
  write_mse_tables(cfg.output_dir, cfg, b);
  std::printf("%-8s %-10s %6s %14s\n", "method", "measure", "n", "wins_pct");
  for (std::size_t k = 0; k < b.methods.size(); ++k)
    std::printf("%-8s %-10s %6ld %14.2f  mean_mse %.4e\n", b.methods[k].c_str(), b.measures[k].c_str(),
                models[k].diag ? models[k].diag->n_eff : models[k].n(), b.wins.percent[k], b.running[k].overall);
  return 0;
}

int cmd_bench_peaks(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const auto models = build_methods(cfg, cfg.methods);
  print_notes(models);
  const auto inst = make_instances(cfg);
  const PeakBench b = bench_peaks(cfg, models, inst);
  write_peak_table(cfg.output_dir, cfg, b);
  std::printf("%-8s %-10s %8s %8s %8s %8s %8s\n", "method", "measure", "missed%", "false%", "wins%", "amp%", "disp");
  for (std::size_t k = 0; k < b.methods.size(); ++k) {
    const PeakSummary s = summarize_peaks(b, k);
    std::printf("%-8s %-10s %8.2f %8.2f %8.2f %8.2f %8.2f\n", b.methods[k].c_str(), b.measures[k].c_str(),
                s.missed_pct, s.false_pct, s.wins_pct, s.rel_amp_err_pct, s.avg_displacement);
  }
  return 0;
}

int cmd_kernel(const Options& o) {
  ExperimentConfig cfg = load(o);
  if (cfg.measure.is_scaled()) throw ConfigError("kernel needs measure.kind = translated");
  if (o.methods.empty()) cfg.methods = {"walrus", "legt", "fout"};
  const auto models = build_methods(cfg, cfg.methods);
  print_notes(models);
  std::vector<KernelResult> ks;
  for (const auto& m : models) ks.push_back(kernel_for(m, cfg.kernel_length, cfg.kernel_window, cfg.run.alpha));
  write_kernel_outputs(cfg.output_dir, cfg, ks);
  std::printf("%-8s %6s %12s %12s\n", "method", "n", "out_ratio", "dead_zone");
  for (std::size_t k = 0; k < ks.size(); ++k)
    std::printf("%-8s %6ld %12.4e %12.2f\n", ks[k].method.c_str(), models[k].n(),
                ks[k].diag.out_of_window_energy_ratio, ks[k].diag.mean_dead_zone());
  return 0;
}

int cmd_reconstruct(const Options& o) {
  ExperimentConfig cfg = load(o);
  if (o.input.empty()) throw ConfigError("reconstruct needs --input");
  SignalInstance s;
  const std::string ext = std::filesystem::path(o.input).extension().string();
  if (ext == ".wav")
    s = load_wav(o.input);
  else if (o.column.empty())
    s = load_csv(o.input, 0);
  else if (std::all_of(o.column.begin(), o.column.end(), [](unsigned char c) { return std::isdigit(c); }))
    s = load_csv(o.input, std::stoi(o.column));
  else
    s = load_csv(o.input, o.column);
  const MethodModel m = build_method(o.method, cfg);
  print_notes({m});
  const long n = static_cast<long>(s.samples.size());
  RunConfig run = cfg.run;
  run.emit_stride = n;
  const StateTrajectory t = run_method(m, s.samples, run);
  const Vec hat = m.rec.window(t.final_state(), m.op.measure, n);
  const long first = n - hat.size();
  std::filesystem::create_directories(cfg.output_dir);
  const std::string path = cfg.output_dir + "/reconstruction.csv";
  save_reconstruction_csv(path, std::span<const double>(s.samples).subspan(first),
                          std::span<const double>(hat.data(), hat.size()), first);
  write_metadata(path, cfg, standard_notes());
  std::printf("samples %ld\nwindow %ld\nmse %.6e\n", n, static_cast<long>(hat.size()),
              overall_mse(std::span<const double>(s.samples).subspan(first),
                          std::span<const double>(hat.data(), hat.size())));
  return 0;
}

int cmd_gen(const Options& o) {
  const ExperimentConfig cfg = load(o);
  std::filesystem::create_directories(cfg.output_dir);
  const auto inst = make_instances(cfg);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    SignalInstance noisy = inst[i].clean;
    noisy.samples = inst[i].input;
    char name[64];
    std::snprintf(name, sizeof name, "/signal_%04zu.csv", i);
    save_signal_csv(cfg.output_dir + name, noisy);
  }
  write_metadata(cfg.output_dir + "/signals", cfg, standard_notes());
  std::printf("wrote %zu signals to %s\n", inst.size(), cfg.output_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"walrus: state-space models from wavelet frames"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* c) {
    c->add_option("--config", o.config, "config file (key = value)");
    c->add_option("--out", o.out, "output directory");
    c->add_option("--methods", o.methods, "comma separated: walrus,legs,legt,fous,fout");
    c->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) {
      o.seed = s;
      o.seed_set = true;
    }, "master seed");
  };
  auto* build = app.add_subcommand("build", "build frame, dual, SSM and diagonal artifacts");
  auto* mse = app.add_subcommand("bench-mse", "MSE comparison and running-MSE quantiles");
  auto* peaks = app.add_subcommand("bench-peaks", "peak detection comparison");
  auto* kernel = app.add_subcommand("kernel", "translated kernels and localization diagnostics");
  auto* rec = app.add_subcommand("reconstruct", "final-time reconstruction of an input series");
  auto* gen = app.add_subcommand("gen", "write the configured synthetic instances");
  for (auto* c : {build, mse, peaks, kernel, rec, gen}) common(c);
  rec->add_option("--input", o.input, "CSV or WAV file")->required();
  rec->add_option("--column", o.column, "CSV column name or index");
  rec->add_option("--method", o.method, "walrus, legs, legt, fous or fout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*build) return cmd_build(o);
    if (*mse) return cmd_bench_mse(o);
    if (*peaks) return cmd_bench_peaks(o);
    if (*kernel) return cmd_kernel(o);
    if (*rec) return cmd_reconstruct(o);
    if (*gen) return cmd_gen(o);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
