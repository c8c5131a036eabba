#pragma once

#include "walrus/analysis.hpp"
#include "walrus/frame.hpp"
#include "walrus/runtime.hpp"
#include "walrus/signals.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace walrus {

// Flat `key = value` configuration with dotted section prefixes. Lines starting
// with '#' are comments. Unknown keys are errors.
struct ExperimentConfig {
  FrameSpec frame;
  Measure measure = Measure::scaled();
  long n_eff = 0;  // 0: the dual rank of the wavelet frame
  RunConfig run;

  GeneratorSpec dataset;
  double noise = 0.001;       // noise power / signal power
  std::string dataset_path;   // external series instead of a generator
  int dataset_column = 0;

  long instances = 100;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<std::string> methods{"walrus", "legs", "fous"};

  PeakDetector peaks;
  long peak_tolerance = 0;    // 0: dataset width

  long kernel_window = 2000;
  long kernel_length = 4000;
  long kernel_plot_columns = 400;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

std::string wavelet_name(const FrameSpec& spec);  // D22, legendre, fourier

}  // namespace walrus
