#pragma once

#include "walrus/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace walrus {

// SplitMix64 stream. uniform() = top 53 bits / 2^53 in [0,1); gaussian() is
// Box-Muller on (1 - uniform(), uniform()), returning the cosine branch first
// and the cached sine branch on the next call.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [0, n), n > 0 (multiply-shift on the top 53 bits).
  long below(long n);
  double gaussian();

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class SignalClass { Blocks, Bumps, Spikes, Piecepoly, External };

std::string signal_class_name(SignalClass c);
SignalClass parse_signal_class(const std::string& s);

struct Event {
  long position = 0;
  double amplitude = 0.0;
  bool operator==(const Event&) const = default;
};

struct SignalInstance {
  std::vector<double> samples;
  std::vector<Event> events;
  std::uint64_t seed = 0;
  SignalClass class_tag = SignalClass::External;
};

struct GeneratorSpec {
  SignalClass class_tag = SignalClass::Spikes;
  long length = 4096;
  long n_events = 10;
  double amp_lo = 0.5;
  double amp_hi = 1.5;
  long width = 100;
  long min_gap = 100;
  std::uint64_t seed = 1;
  bool random_sign = true;      // blocks: jump signs drawn at random
  std::vector<long> positions;  // spikes: explicit event (center) positions, overrides the draw

  void validate() const;
  bool operator==(const GeneratorSpec&) const = default;
};

// Sorted start indices for n items of footprint `width` separated by at least
// `min_gap`, uniform over feasible configurations, all inside [lo, hi).
std::vector<long> place_events(SplitMix64& rng, long n, long width, long min_gap, long lo, long hi);

SignalInstance gen_blocks(const GeneratorSpec& spec);
SignalInstance gen_bumps(const GeneratorSpec& spec);
SignalInstance gen_spikes(const GeneratorSpec& spec);
SignalInstance gen_piecepoly(const GeneratorSpec& spec);
SignalInstance generate(const GeneratorSpec& spec);

// Gaussian noise with variance snr_param * mean(samples^2).
SignalInstance add_noise(const SignalInstance& s, double snr_param, std::uint64_t seed);

// One numeric column (index or header name). A non-numeric first row is a header.
SignalInstance load_csv(const std::string& path, int column = 0);
SignalInstance load_csv(const std::string& path, const std::string& column);
// RIFF PCM 16-bit little endian, first channel, scaled by 1/32768.
SignalInstance load_wav(const std::string& path);
void save_wav(const std::string& path, const std::vector<double>& samples, int sample_rate = 16000);

// `index,value,is_event,event_amplitude`
void save_signal_csv(const std::string& path, const SignalInstance& s);
SignalInstance load_signal_csv(const std::string& path);

}  // namespace walrus
