#include "walrus/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace walrus {

static_assert(std::endian::native == std::endian::little, "artifact files assume a little-endian host");

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot write " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path);
  return is;
}

void write_doubles(std::ostream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& is, double* p, std::size_t n, const std::string& path) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<std::size_t>(is.gcount()) != n * sizeof(double)) throw FormatError(path + ": truncated data");
}

void write_complex(std::ostream& os, const std::complex<double>* p, std::size_t n) {
  write_doubles(os, reinterpret_cast<const double*>(p), 2 * n);
}

void read_complex(std::istream& is, std::complex<double>* p, std::size_t n, const std::string& path) {
  read_doubles(is, reinterpret_cast<double*>(p), 2 * n, path);
}

// "TAG v1 k=v k=v" -> fields; checks the tag.
std::map<std::string, std::string> parse_header(std::istream& is, const std::string& tag, const std::string& path) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path + ": missing header");
  std::istringstream ss(line);
  std::string t, ver;
  ss >> t >> ver;
  if (t != tag || ver != "v1") throw FormatError(path + ": expected a " + tag + " v1 header");
  std::map<std::string, std::string> out;
  std::string kv;
  while (ss >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw FormatError(path + ": malformed header field '" + kv + "'");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

const std::string& field(const std::map<std::string, std::string>& h, const std::string& k, const std::string& path) {
  const auto it = h.find(k);
  if (it == h.end()) throw FormatError(path + ": header lacks '" + k + "'");
  return it->second;
}

long int_field(const std::map<std::string, std::string>& h, const std::string& k, const std::string& path) {
  try {
    std::size_t pos = 0;
    const std::string& v = field(h, k, path);
    const long r = std::stol(v, &pos);
    if (pos != v.size() || r < 0) throw FormatError("");
    return r;
  } catch (const std::exception&) {
    throw FormatError(path + ": bad integer for '" + k + "'");
  }
}

std::string measure_fields(const Measure& m) {
  return "measure=" + m.name() + " theta=" + std::to_string(m.theta);
}

Measure measure_from(const std::map<std::string, std::string>& h, const std::string& path) {
  const std::string& kind = field(h, "measure", path);
  if (kind == "scaled") return Measure::scaled();
  if (kind == "translated") return Measure::translated(int_field(h, "theta", path));
  throw FormatError(path + ": unknown measure '" + kind + "'");
}

std::string read_line(std::istream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path + ": truncated header block");
  return line;
}

}  // namespace

void save_frame(const std::string& path, const Frame& f) {
  auto os = open_out(path);
  os << "WALRUS-FRAME v1 n_full=" << f.n_full() << " L=" << f.grid_len() << " grid=endpoint\n";
  os << "id " << f.id << '\n';
  for (const auto& d : f.descriptors) os << element_kind_name(d.kind) << ' ' << d.scale << ' ' << d.shift_index << '\n';
  write_doubles(os, f.rows.data(), static_cast<std::size_t>(f.rows.size()));
}

Frame load_frame(const std::string& path) {
  auto is = open_in(path);
  const auto h = parse_header(is, "WALRUS-FRAME", path);
  if (field(h, "grid", path) != "endpoint") throw FormatError(path + ": unsupported grid");
  const long n = int_field(h, "n_full", path), L = int_field(h, "L", path);
  Frame f;
  const std::string idline = read_line(is, path);
  if (idline.rfind("id ", 0) != 0) throw FormatError(path + ": missing id line");
  f.id = idline.substr(3);
  for (long i = 0; i < n; ++i) {
    std::istringstream ss(read_line(is, path));
    std::string kind;
    ElementDescriptor d;
    if (!(ss >> kind >> d.scale >> d.shift_index)) throw FormatError(path + ": malformed descriptor line");
    d.kind = parse_element_kind(kind);
    f.descriptors.push_back(d);
  }
  f.rows.resize(n, L);
  read_doubles(is, f.rows.data(), static_cast<std::size_t>(n * L), path);
  return f;
}

void save_dual(const std::string& path, const DualFrame& d) {
  auto os = open_out(path);
  os << "WALRUS-DUAL v1 n_full=" << d.rows.rows() << " L=" << d.rows.cols() << " grid=endpoint\n";
  os.precision(17);
  os << "rank_eff=" << d.rank_eff << " rcond=" << d.rcond << " n_sigma=" << d.sigma.size() << '\n';
  write_doubles(os, d.rows.data(), static_cast<std::size_t>(d.rows.size()));
  write_doubles(os, d.sigma.data(), static_cast<std::size_t>(d.sigma.size()));
}

DualFrame load_dual(const std::string& path) {
  auto is = open_in(path);
  const auto h = parse_header(is, "WALRUS-DUAL", path);
  const long n = int_field(h, "n_full", path), L = int_field(h, "L", path);
  std::istringstream ss(read_line(is, path));
  std::map<std::string, std::string> extra;
  std::string kv;
  while (ss >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw FormatError(path + ": malformed field");
    extra[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  DualFrame d;
  d.rank_eff = int_field(extra, "rank_eff", path);
  d.rcond = std::stod(field(extra, "rcond", path));
  const long ns = int_field(extra, "n_sigma", path);
  d.rows.resize(n, L);
  d.sigma.resize(ns);
  read_doubles(is, d.rows.data(), static_cast<std::size_t>(n * L), path);
  read_doubles(is, d.sigma.data(), static_cast<std::size_t>(ns), path);
  return d;
}

void save_ssm(const std::string& path, const SSMOperator& op) {
  auto os = open_out(path);
  os << "WALRUS-SSM v1 n=" << op.n() << " measure=" << op.measure.name()
     << " construction=" << (op.construction == Construction::NumericalSaFARi ? "saf" : "hippo") << '\n';
  os << measure_fields(op.measure) << " frame_id=" << op.frame_id << '\n';
  const RowMat a = op.a;
  write_doubles(os, a.data(), static_cast<std::size_t>(a.size()));
  write_doubles(os, op.b.data(), static_cast<std::size_t>(op.b.size()));
}

SSMOperator load_ssm(const std::string& path) {
  auto is = open_in(path);
  const auto h = parse_header(is, "WALRUS-SSM", path);
  const long n = int_field(h, "n", path);
  std::istringstream ss(read_line(is, path));
  std::map<std::string, std::string> extra;
  std::string kv;
  while (ss >> kv) {
    const auto eq = kv.find('=');
    if (eq != std::string::npos) extra[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  SSMOperator op;
  op.measure = measure_from(extra, path);
  if (field(h, "measure", path) != op.measure.name()) throw FormatError(path + ": inconsistent measure fields");
  const std::string& c = field(h, "construction", path);
  if (c == "saf") op.construction = Construction::NumericalSaFARi;
  else if (c == "hippo") op.construction = Construction::ClosedFormHiPPO;
  else throw FormatError(path + ": unknown construction '" + c + "'");
  op.frame_id = extra.count("frame_id") ? extra["frame_id"] : "";
  RowMat a(n, n);
  op.b.resize(n);
  read_doubles(is, a.data(), static_cast<std::size_t>(n * n), path);
  read_doubles(is, op.b.data(), static_cast<std::size_t>(n), path);
  op.a = a;
  return op;
}

void save_diag(const std::string& path, const DiagonalSSM& d) {
  auto os = open_out(path);
  os << "WALRUS-DIAG v1 n_eff=" << d.n_eff << '\n';
  os.precision(17);
  os << "n_full=" << d.v_out.rows() << ' ' << measure_fields(d.measure) << " cond_v=" << d.cond_v << '\n';
  write_complex(os, d.lambdas.data(), static_cast<std::size_t>(d.n_eff));
  write_complex(os, d.b_tilde.data(), static_cast<std::size_t>(d.n_eff));
  const CRowMat v = d.v_out;
  write_complex(os, v.data(), static_cast<std::size_t>(v.size()));
}

DiagonalSSM load_diag(const std::string& path) {
  auto is = open_in(path);
  const auto h = parse_header(is, "WALRUS-DIAG", path);
  std::istringstream ss(read_line(is, path));
  std::map<std::string, std::string> extra;
  std::string kv;
  while (ss >> kv) {
    const auto eq = kv.find('=');
    if (eq != std::string::npos) extra[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  DiagonalSSM d;
  d.n_eff = int_field(h, "n_eff", path);
  const long n = int_field(extra, "n_full", path);
  d.measure = measure_from(extra, path);
  d.cond_v = std::stod(field(extra, "cond_v", path));
  d.lambdas.resize(d.n_eff);
  d.b_tilde.resize(d.n_eff);
  CRowMat v(n, d.n_eff);
  read_complex(is, d.lambdas.data(), static_cast<std::size_t>(d.n_eff), path);
  read_complex(is, d.b_tilde.data(), static_cast<std::size_t>(d.n_eff), path);
  read_complex(is, v.data(), static_cast<std::size_t>(v.size()), path);
  d.v_out = v;
  return d;
}

void save_trajectory_csv(const std::string& path, const StateTrajectory& t) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  os << "step";
  for (long i = 0; i < t.states.cols(); ++i) os << ",c_" << i;
  os << '\n';
  os.precision(17);
  for (std::size_t e = 0; e < t.times.size(); ++e) {
    os << t.times[e];
    for (long i = 0; i < t.states.cols(); ++i) os << ',' << t.states(static_cast<long>(e), i);
    os << '\n';
  }
}

void save_reconstruction_csv(const std::string& path, std::span<const double> u, std::span<const double> u_hat,
                             long first_index) {
  if (u.size() != u_hat.size()) throw ConfigError("reconstruction export: length mismatch");
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  os << "t,u,u_hat\n";
  os.precision(17);
  for (std::size_t k = 0; k < u.size(); ++k) os << first_index + static_cast<long>(k) << ',' << u[k] << ',' << u_hat[k] << '\n';
}

}  // namespace walrus
