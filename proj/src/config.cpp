#include "walrus/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace walrus {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

template <class T>
std::vector<T> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& s : split_list(v)) out.push_back(parse_int<T>(key, s));
  return out;
}

std::string real_str(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

void set_wavelet(FrameSpec& f, const std::string& v) {
  if (v == "legendre" || v == "fourier") {
    f.family = parse_family(v);
    return;
  }
  if (v.size() >= 2 && (v[0] == 'D' || v[0] == 'd')) {
    const int taps = parse_int<int>("frame.wavelet", v.substr(1));
    if (taps % 2 == 0 && taps >= 2) {
      f.family = Family::Daubechies;
      f.order_p = taps / 2;
      return;
    }
  }
  throw ConfigError("frame.wavelet must be D<2p> (D4..D22), legendre or fourier; got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"frame.wavelet", [](auto& c, auto&, auto& v) { set_wavelet(c.frame, v); }},
      {"frame.scale_min", [](auto& c, auto& k, auto& v) { c.frame.scale_min = parse_int<int>(k, v); }},
      {"frame.scale_max", [](auto& c, auto& k, auto& v) { c.frame.scale_max = parse_int<int>(k, v); }},
      {"frame.shift_m", [](auto& c, auto& k, auto& v) { c.frame.shift_m = parse_real(k, v); }},
      {"frame.grid_len", [](auto& c, auto& k, auto& v) { c.frame.grid_len = parse_int<int>(k, v); }},
      {"frame.rcond", [](auto& c, auto& k, auto& v) { c.frame.rcond = parse_real(k, v); }},
      {"frame.basis_n", [](auto& c, auto& k, auto& v) { c.frame.basis_n = parse_int<int>(k, v); }},
      {"frame.cascade_levels", [](auto& c, auto& k, auto& v) { c.frame.cascade_levels = parse_int<int>(k, v); }},
      {"measure.kind",
       [](auto& c, auto&, auto& v) {
         if (v == "scaled") c.measure.kind = Measure::Kind::Scaled;
         else if (v == "translated") c.measure.kind = Measure::Kind::Translated;
         else throw ConfigError("measure.kind must be scaled or translated, got '" + v + "'");
       }},
      {"measure.theta", [](auto& c, auto& k, auto& v) { c.measure.theta = parse_int<long>(k, v); }},
      {"model.n_eff", [](auto& c, auto& k, auto& v) { c.n_eff = parse_int<long>(k, v); }},
      {"run.alpha", [](auto& c, auto& k, auto& v) { c.run.alpha = parse_real(k, v); }},
      {"run.mode", [](auto& c, auto&, auto& v) { c.run.mode = parse_run_mode(v); }},
      {"run.emit_stride", [](auto& c, auto& k, auto& v) { c.run.emit_stride = parse_int<long>(k, v); }},
      {"dataset.class", [](auto& c, auto&, auto& v) { c.dataset.class_tag = parse_signal_class(v); }},
      {"dataset.length", [](auto& c, auto& k, auto& v) { c.dataset.length = parse_int<long>(k, v); }},
      {"dataset.n_events", [](auto& c, auto& k, auto& v) { c.dataset.n_events = parse_int<long>(k, v); }},
      {"dataset.amp_lo", [](auto& c, auto& k, auto& v) { c.dataset.amp_lo = parse_real(k, v); }},
      {"dataset.amp_hi", [](auto& c, auto& k, auto& v) { c.dataset.amp_hi = parse_real(k, v); }},
      {"dataset.width", [](auto& c, auto& k, auto& v) { c.dataset.width = parse_int<long>(k, v); }},
      {"dataset.min_gap", [](auto& c, auto& k, auto& v) { c.dataset.min_gap = parse_int<long>(k, v); }},
      {"dataset.random_sign", [](auto& c, auto& k, auto& v) { c.dataset.random_sign = parse_bool(k, v); }},
      {"dataset.positions", [](auto& c, auto& k, auto& v) { c.dataset.positions = parse_int_list<long>(k, v); }},
      {"dataset.noise", [](auto& c, auto& k, auto& v) { c.noise = parse_real(k, v); }},
      {"dataset.path", [](auto& c, auto&, auto& v) { c.dataset_path = v; }},
      {"dataset.column", [](auto& c, auto& k, auto& v) { c.dataset_column = parse_int<int>(k, v); }},
      {"experiment.instances", [](auto& c, auto& k, auto& v) { c.instances = parse_int<long>(k, v); }},
      {"experiment.seed", [](auto& c, auto& k, auto& v) { c.seed = parse_int<std::uint64_t>(k, v); }},
      {"experiment.output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"experiment.methods", [](auto& c, auto&, auto& v) { c.methods = split_list(v); }},
      {"peaks.scales", [](auto& c, auto& k, auto& v) { c.peaks.scales = parse_int_list<long>(k, v); }},
      {"peaks.threshold_k", [](auto& c, auto& k, auto& v) { c.peaks.threshold_k = parse_real(k, v); }},
      {"peaks.persistence", [](auto& c, auto& k, auto& v) { c.peaks.persistence = parse_int<int>(k, v); }},
      {"peaks.width", [](auto& c, auto& k, auto& v) { c.peaks.width = parse_int<long>(k, v); }},
      {"peaks.relative_floor", [](auto& c, auto& k, auto& v) { c.peaks.relative_floor = parse_real(k, v); }},
      {"peaks.positive_only", [](auto& c, auto& k, auto& v) { c.peaks.positive_only = parse_bool(k, v); }},
      {"peaks.tolerance", [](auto& c, auto& k, auto& v) { c.peak_tolerance = parse_int<long>(k, v); }},
      {"kernel.window", [](auto& c, auto& k, auto& v) { c.kernel_window = parse_int<long>(k, v); }},
      {"kernel.length", [](auto& c, auto& k, auto& v) { c.kernel_length = parse_int<long>(k, v); }},
      {"kernel.plot_columns", [](auto& c, auto& k, auto& v) { c.kernel_plot_columns = parse_int<long>(k, v); }},
  };
  return table;
}

}  // namespace

std::string wavelet_name(const FrameSpec& spec) {
  return spec.family == Family::Daubechies ? "D" + std::to_string(2 * spec.order_p) : family_name(spec.family);
}

void ExperimentConfig::validate() const {
  frame.validate();
  if (!measure.is_scaled() && measure.theta <= 0) throw ConfigError("measure.theta must be > 0 for translated runs");
  if (n_eff < 0) throw ConfigError("model.n_eff must be >= 0");
  run.validate();
  if (dataset_path.empty()) dataset.validate();
  if (noise < 0.0) throw ConfigError("dataset.noise must be >= 0");
  if (instances < 1) throw ConfigError("experiment.instances must be >= 1");
  if (methods.empty()) throw ConfigError("experiment.methods must not be empty");
  peaks.validate();
  if (peak_tolerance < 0) throw ConfigError("peaks.tolerance must be >= 0");
  if (kernel_window < 1 || kernel_window > kernel_length)
    throw ConfigError("kernel.window must lie in 1..kernel.length");
  if (kernel_plot_columns < 1) throw ConfigError("kernel.plot_columns must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> unknown;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      unknown.push_back(key);
      continue;
    }
    it->second(cfg, key, value);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  kv("frame.wavelet", wavelet_name(c.frame));
  kv("frame.scale_min", std::to_string(c.frame.scale_min));
  kv("frame.scale_max", std::to_string(c.frame.scale_max));
  kv("frame.shift_m", real_str(c.frame.shift_m));
  kv("frame.grid_len", std::to_string(c.frame.grid_len));
  kv("frame.rcond", real_str(c.frame.rcond));
  kv("frame.basis_n", std::to_string(c.frame.basis_n));
  kv("frame.cascade_levels", std::to_string(c.frame.cascade_levels));
  kv("measure.kind", c.measure.name());
  kv("measure.theta", std::to_string(c.measure.theta));
  kv("model.n_eff", std::to_string(c.n_eff));
  kv("run.alpha", real_str(c.run.alpha));
  kv("run.mode", run_mode_name(c.run.mode));
  kv("run.emit_stride", std::to_string(c.run.emit_stride));
  kv("dataset.class", signal_class_name(c.dataset.class_tag));
  kv("dataset.length", std::to_string(c.dataset.length));
  kv("dataset.n_events", std::to_string(c.dataset.n_events));
  kv("dataset.amp_lo", real_str(c.dataset.amp_lo));
  kv("dataset.amp_hi", real_str(c.dataset.amp_hi));
  kv("dataset.width", std::to_string(c.dataset.width));
  kv("dataset.min_gap", std::to_string(c.dataset.min_gap));
  kv("dataset.random_sign", c.dataset.random_sign ? "true" : "false");
  kv("dataset.positions", join(c.dataset.positions));
  kv("dataset.noise", real_str(c.noise));
  kv("dataset.path", c.dataset_path);
  kv("dataset.column", std::to_string(c.dataset_column));
  kv("experiment.instances", std::to_string(c.instances));
  kv("experiment.seed", std::to_string(c.seed));
  kv("experiment.output_dir", c.output_dir);
  kv("experiment.methods", join(c.methods));
  kv("peaks.scales", join(c.peaks.scales));
  kv("peaks.threshold_k", real_str(c.peaks.threshold_k));
  kv("peaks.persistence", std::to_string(c.peaks.persistence));
  kv("peaks.width", std::to_string(c.peaks.width));
  kv("peaks.relative_floor", real_str(c.peaks.relative_floor));
  kv("peaks.positive_only", c.peaks.positive_only ? "true" : "false");
  kv("peaks.tolerance", std::to_string(c.peak_tolerance));
  kv("kernel.window", std::to_string(c.kernel_window));
  kv("kernel.length", std::to_string(c.kernel_length));
  kv("kernel.plot_columns", std::to_string(c.kernel_plot_columns));
  return os.str();
}

}  // namespace walrus
