#include "walrus/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace walrus {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

long SplitMix64::below(long n) {
  if (n <= 0) throw ConfigError("SplitMix64::below needs n > 0");
  return static_cast<long>(uniform() * static_cast<double>(n));
}

double SplitMix64::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform(), u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::string signal_class_name(SignalClass c) {
  switch (c) {
    case SignalClass::Blocks: return "blocks";
    case SignalClass::Bumps: return "bumps";
    case SignalClass::Spikes: return "spikes";
    case SignalClass::Piecepoly: return "piecepoly";
    case SignalClass::External: return "external";
  }
  return "?";
}

SignalClass parse_signal_class(const std::string& s) {
  if (s == "blocks") return SignalClass::Blocks;
  if (s == "bumps") return SignalClass::Bumps;
  if (s == "spikes") return SignalClass::Spikes;
  if (s == "piecepoly") return SignalClass::Piecepoly;
  if (s == "external") return SignalClass::External;
  throw ConfigError("unknown signal class '" + s + "'");
}

void GeneratorSpec::validate() const {
  if (length < 1) throw ConfigError("dataset.length must be >= 1");
  if (n_events < 0) throw ConfigError("dataset.n_events must be >= 0");
  if (width < 1) throw ConfigError("dataset.width must be >= 1");
  if (min_gap < 0) throw ConfigError("dataset.min_gap must be >= 0");
  if (!(amp_lo <= amp_hi)) throw ConfigError("dataset.amp_lo must not exceed dataset.amp_hi");
  if (n_events * (width + min_gap) > length)
    throw ConfigError("infeasible spacing: n_events * (width + min_gap) exceeds length");
}

std::vector<long> place_events(SplitMix64& rng, long n, long width, long min_gap, long lo, long hi) {
  if (n == 0) return {};
  const long need = n * width + (n - 1) * min_gap;
  const long slack = (hi - lo) - need;
  if (slack < 0) throw ConfigError("infeasible spacing: events do not fit in the signal");
  std::vector<long> s(n);
  for (auto& v : s) v = rng.below(slack + 1);
  std::sort(s.begin(), s.end());
  for (long i = 0; i < n; ++i) s[i] += lo + i * (width + min_gap);
  return s;
}

namespace {

SignalInstance start(const GeneratorSpec& spec, SignalClass tag) {
  spec.validate();
  SignalInstance s;
  s.samples.assign(spec.length, 0.0);
  s.seed = spec.seed;
  s.class_tag = tag;
  return s;
}

}  // namespace

SignalInstance gen_blocks(const GeneratorSpec& spec) {
  if (spec.n_events < 1) throw ConfigError("blocks need n_events >= 1");
  SignalInstance s = start(spec, SignalClass::Blocks);
  SplitMix64 rng(spec.seed);
  const auto pos = place_events(rng, spec.n_events, 1, spec.min_gap, 1, spec.length);
  double level = 0.0;
  std::size_t next = 0;
  for (long k = 0; k < spec.length; ++k) {
    if (next < pos.size() && pos[next] == k) {
      double h = rng.uniform(spec.amp_lo, spec.amp_hi);
      if (spec.random_sign && rng.uniform() < 0.5) h = -h;
      level += h;
      s.events.push_back({k, h});
      ++next;
    }
    s.samples[k] = level;
  }
  return s;
}

SignalInstance gen_bumps(const GeneratorSpec& spec) {
  SignalInstance s = start(spec, SignalClass::Bumps);
  SplitMix64 rng(spec.seed);
  const auto pos = place_events(rng, spec.n_events, spec.width, spec.min_gap, 0, spec.length);
  // Cusp scale is a quarter of the pulse footprint.
  const double w = std::max(1.0, static_cast<double>(spec.width) / 4.0);
  for (long p : pos) {
    const long c = p + spec.width / 2;
    const double a = rng.uniform(spec.amp_lo, spec.amp_hi);
    s.events.push_back({c, a});
    for (long k = 0; k < spec.length; ++k) s.samples[k] += a * std::pow(1.0 + std::abs(static_cast<double>(k - c)) / w, -4.0);
  }
  return s;
}

SignalInstance gen_spikes(const GeneratorSpec& spec) {
  SignalInstance s = start(spec, SignalClass::Spikes);
  SplitMix64 rng(spec.seed);
  std::vector<long> starts;
  if (!spec.positions.empty()) {
    for (std::size_t i = 0; i < spec.positions.size(); ++i) {
      const long st = spec.positions[i] - spec.width / 2;
      if (st < 0 || st + spec.width > spec.length) throw ConfigError("spike position override out of range");
      if (i > 0 && spec.positions[i] <= spec.positions[i - 1]) throw ConfigError("spike positions must increase");
      starts.push_back(st);
    }
  } else {
    starts = place_events(rng, spec.n_events, spec.width, spec.min_gap, 0, spec.length);
  }
  for (long st : starts) {
    const double a = rng.uniform(spec.amp_lo, spec.amp_hi);
    for (long k = st; k < st + spec.width; ++k) s.samples[k] += a;
    s.events.push_back({st + spec.width / 2, a});
  }
  return s;
}

SignalInstance gen_piecepoly(const GeneratorSpec& spec) {
  SignalInstance s = start(spec, SignalClass::Piecepoly);
  SplitMix64 rng(spec.seed);
  auto bps = place_events(rng, spec.n_events, 1, spec.min_gap, 1, spec.length);
  std::vector<long> edges{0};
  edges.insert(edges.end(), bps.begin(), bps.end());
  edges.push_back(spec.length);
  const double span = std::max(std::abs(spec.amp_lo), std::abs(spec.amp_hi));
  double left = 0.0;
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const long a = edges[seg], b = edges[seg + 1];
    const int degree = static_cast<int>(rng.below(4));
    double coef[4] = {0.0, 0.0, 0.0, 0.0};
    for (int d = 0; d <= degree; ++d) coef[d] = rng.uniform(-span, span);
    if (seg > 0) {
      double jump = rng.uniform(spec.amp_lo, spec.amp_hi);
      if (rng.uniform() < 0.5) jump = -jump;
      coef[0] = left + jump;
    }
    const double len = static_cast<double>(b - a);
    for (long k = a; k < b; ++k) {
      const double x = static_cast<double>(k - a) / len;
      s.samples[k] = coef[0] + x * (coef[1] + x * (coef[2] + x * coef[3]));
    }
    if (seg > 0) s.events.push_back({a, s.samples[a] - s.samples[a - 1]});
    left = s.samples[b - 1];
  }
  return s;
}

SignalInstance generate(const GeneratorSpec& spec) {
  switch (spec.class_tag) {
    case SignalClass::Blocks: return gen_blocks(spec);
    case SignalClass::Bumps: return gen_bumps(spec);
    case SignalClass::Spikes: return gen_spikes(spec);
    case SignalClass::Piecepoly: return gen_piecepoly(spec);
    case SignalClass::External: break;
  }
  throw ConfigError("external signals are loaded, not generated");
}

SignalInstance add_noise(const SignalInstance& s, double snr_param, std::uint64_t seed) {
  if (snr_param < 0.0) throw ConfigError("noise parameter must be >= 0");
  SignalInstance out = s;
  if (snr_param == 0.0 || s.samples.empty()) return out;
  double power = 0.0;
  for (double v : s.samples) power += v * v;
  power /= static_cast<double>(s.samples.size());
  const double sd = std::sqrt(snr_param * power);
  SplitMix64 rng(seed);
  for (double& v : out.samples) v += sd * rng.gaussian();
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t\"");
    const auto e = f.find_last_not_of(" \t\"");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto r = std::from_chars(first, last, v);
  return r.ec == std::errc() && r.ptr == last;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(split_csv(line));
  }
  return rows;
}

SignalInstance column_of(const std::vector<std::vector<std::string>>& rows, std::size_t first, std::size_t col,
                         const std::string& path) {
  SignalInstance s;
  for (std::size_t r = first; r < rows.size(); ++r) {
    double v;
    if (col >= rows[r].size() || !parse_number(rows[r][col], v))
      throw FormatError(path + ": row " + std::to_string(r + 1) + " has no numeric value in column " + std::to_string(col));
    s.samples.push_back(v);
  }
  return s;
}

}  // namespace

SignalInstance load_csv(const std::string& path, int column) {
  if (column < 0) throw ConfigError("CSV column index must be >= 0");
  const auto rows = read_rows(path);
  if (rows.empty()) throw FormatError(path + ": empty CSV");
  double v;
  const auto col = static_cast<std::size_t>(column);
  const bool header = col >= rows[0].size() || !parse_number(rows[0][col], v);
  return column_of(rows, header ? 1 : 0, col, path);
}

SignalInstance load_csv(const std::string& path, const std::string& column) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw FormatError(path + ": empty CSV");
  const auto it = std::find(rows[0].begin(), rows[0].end(), column);
  if (it == rows[0].end()) throw FormatError(path + ": no column named '" + column + "'");
  return column_of(rows, 1, static_cast<std::size_t>(it - rows[0].begin()), path);
}

namespace {

std::uint32_t le32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}
void put16(std::ostream& os, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

SignalInstance load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw FormatError(path + ": not a RIFF/WAVE file");
  std::size_t pos = 12;
  int channels = 0, bits = 0;
  bool have_fmt = false;
  while (pos + 8 <= buf.size()) {
    const unsigned char* chunk = buf.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > buf.size()) throw FormatError(path + ": truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError(path + ": short fmt chunk");
      const std::uint16_t format = le16(buf.data() + body);
      channels = le16(buf.data() + body + 2);
      bits = le16(buf.data() + body + 14);
      if (format == 0xFFFE && size >= 26) {
        const std::uint16_t sub = le16(buf.data() + body + 24);
        if (sub != 1) throw FormatError(path + ": unsupported WAV encoding (extensible, non-PCM)");
      } else if (format != 1) {
        throw FormatError(path + ": unsupported WAV encoding (format tag " + std::to_string(format) + ")");
      }
      if (bits != 16) throw FormatError(path + ": unsupported WAV encoding (" + std::to_string(bits) + "-bit)");
      if (channels < 1) throw FormatError(path + ": no channels");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(path + ": data chunk before fmt chunk");
      SignalInstance s;
      const std::size_t frame = 2 * static_cast<std::size_t>(channels);
      for (std::size_t off = 0; off + frame <= size; off += frame) {
        const auto v = static_cast<std::int16_t>(le16(buf.data() + body + off));
        s.samples.push_back(static_cast<double>(v) / 32768.0);
      }
      return s;
    }
    pos = body + size + (size & 1);
  }
  throw FormatError(path + ": no data chunk");
}

void save_wav(const std::string& path, const std::vector<double>& samples, int sample_rate) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path);
  const auto bytes = static_cast<std::uint32_t>(2 * samples.size());
  os.write("RIFF", 4);
  put32(os, 36 + bytes);
  os.write("WAVEfmt ", 8);
  put32(os, 16);
  put16(os, 1);
  put16(os, 1);
  put32(os, static_cast<std::uint32_t>(sample_rate));
  put32(os, static_cast<std::uint32_t>(2 * sample_rate));
  put16(os, 2);
  put16(os, 16);
  os.write("data", 4);
  put32(os, bytes);
  for (double v : samples) {
    const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
    put16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
}

void save_signal_csv(const std::string& path, const SignalInstance& s) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  os << "index,value,is_event,event_amplitude\n";
  os.precision(17);
  std::size_t e = 0;
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    const bool ev = e < s.events.size() && s.events[e].position == static_cast<long>(k);
    os << k << ',' << s.samples[k] << ',' << (ev ? 1 : 0) << ',' << (ev ? s.events[e].amplitude : 0.0) << '\n';
    if (ev) ++e;
  }
}

SignalInstance load_signal_csv(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "index")
    throw FormatError(path + ": expected header index,value[,is_event,event_amplitude]");
  SignalInstance s = column_of(rows, 1, 1, path);
  if (rows[0].size() >= 4) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      double flag = 0.0, amp = 0.0, idx = 0.0;
      if (rows[r].size() < 4 || !parse_number(rows[r][2], flag) || !parse_number(rows[r][3], amp) ||
          !parse_number(rows[r][0], idx))
        throw FormatError(path + ": malformed event columns at row " + std::to_string(r + 1));
      if (flag != 0.0) s.events.push_back({static_cast<long>(idx), amp});
    }
  }
  return s;
}

}  // namespace walrus
