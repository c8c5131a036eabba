#include "walrus/frame.hpp"

#include "walrus/kernels.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace walrus {

std::string family_name(Family f) {
  switch (f) {
    case Family::Daubechies: return "daubechies";
    case Family::Legendre: return "legendre";
    case Family::Fourier: return "fourier";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "daubechies") return Family::Daubechies;
  if (s == "legendre") return Family::Legendre;
  if (s == "fourier") return Family::Fourier;
  throw ConfigError("unknown frame family '" + s + "' (expected daubechies, legendre or fourier)");
}

std::string element_kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::Father: return "father";
    case ElementKind::Mother: return "mother";
    case ElementKind::Basis: return "basis";
  }
  return "?";
}

ElementKind parse_element_kind(const std::string& s) {
  if (s == "father") return ElementKind::Father;
  if (s == "mother") return ElementKind::Mother;
  if (s == "basis") return ElementKind::Basis;
  throw FormatError("unknown element kind '" + s + "'");
}

void FrameSpec::validate() const {
  if (grid_len < 4 || (grid_len & (grid_len - 1)) != 0)
    throw ConfigError("frame.grid_len must be a power of two >= 4, got " + std::to_string(grid_len));
  if (!(rcond > 0.0 && rcond <= 1.0)) throw ConfigError("frame.rcond must lie in (0, 1]");
  if (family == Family::Daubechies) {
    if (order_p < 2 || order_p > kMaxDaubechiesOrder)
      throw ConfigError("wavelet frames need a differentiable Daubechies order, p in 2..11; got " +
                        std::to_string(order_p));
    if (scale_min > scale_max) throw ConfigError("frame.scale_min must not exceed frame.scale_max");
    if (scale_min < -12 || scale_max > 12) throw ConfigError("frame scales must lie in -12..12");
    if (!(shift_m > 0.0 && shift_m <= 1.0)) throw ConfigError("frame.shift_m must lie in (0, 1]");
    if (cascade_levels < 4 || cascade_levels > 20) throw ConfigError("frame.cascade_levels must lie in 4..20");
  } else if (basis_n < 1) {
    throw ConfigError("frame.basis_n must be >= 1 for " + family_name(family) + " frames");
  }
}

std::string FrameSpec::id() const {
  std::ostringstream os;
  char m[32];
  const auto res = std::to_chars(m, m + sizeof m, shift_m);
  os << family_name(family) << ":L=" << grid_len;
  if (family == Family::Daubechies)
    os << ":p=" << order_p << ":scales=" << scale_min << ".." << scale_max << ":m=" << std::string_view(m, res.ptr)
       << ":J=" << cascade_levels;
  else
    os << ":n=" << basis_n;
  return os.str();
}

Vec grid_points(long L) {
  Vec t(L);
  for (long k = 0; k < L; ++k) t(k) = static_cast<double>(k) / static_cast<double>(L - 1);
  return t;
}

Vec quadrature_weights(long L) {
  const double h = 1.0 / static_cast<double>(L - 1);
  Vec w = Vec::Constant(L, h);
  w(0) = w(L - 1) = 0.5 * h;
  return w;
}

double discrete_norm(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const Vec w = quadrature_weights(row.size());
  return std::sqrt((row.transpose().array().square() * w.array()).sum());
}

double wavelet_offset(int order_p, double shift_m, int scale, long shift_index) {
  const double support = 2.0 * order_p - 1.0;
  return static_cast<double>(shift_index) * shift_m * std::ldexp(1.0, scale) / support;
}

double wavelet_sample(const Cascade& c, ElementKind kind, int scale, double offset, double t) {
  const double x = (t - offset) * c.support / std::ldexp(1.0, scale);
  return kind == ElementKind::Father ? c.phi_at(x) : c.psi_at(x);
}

std::vector<long> wavelet_shift_range(int order_p, double shift_m, int scale) {
  const double len = std::ldexp(1.0, scale);
  const double step = shift_m * len / (2.0 * order_p - 1.0);
  std::vector<long> out;
  const long lo = static_cast<long>(std::floor(-len / step)) + 1;
  const long hi = static_cast<long>(std::ceil(1.0 / step));
  for (long k = lo; k <= hi; ++k) {
    const double off = wavelet_offset(order_p, shift_m, scale, k);
    if (off > -len && off < 1.0) out.push_back(k);
  }
  return out;
}

Frame build_wavelet_frame(const FrameSpec& spec) {
  spec.validate();
  if (spec.family != Family::Daubechies) throw ConfigError("build_wavelet_frame needs a daubechies frame spec");
  const Cascade c = cascade(daubechies_filter(spec.order_p), spec.cascade_levels);
  std::vector<ElementDescriptor> cand;
  for (long k : wavelet_shift_range(spec.order_p, spec.shift_m, spec.scale_max))
    cand.push_back({ElementKind::Father, spec.scale_max, k});
  for (int s = spec.scale_min; s <= spec.scale_max; ++s)
    for (long k : wavelet_shift_range(spec.order_p, spec.shift_m, s)) cand.push_back({ElementKind::Mother, s, k});

  const long L = spec.grid_len;
  RowMat raw(static_cast<long>(cand.size()), L);
  kernels::sample_wavelet_rows(c, {spec.order_p, spec.shift_m}, cand, raw);

  const Vec w = quadrature_weights(L);
  const Vec energy = raw.array().square().matrix() * w;
  Frame f;
  f.id = spec.id();
  long kept = 0;
  for (long i = 0; i < raw.rows(); ++i) kept += energy(i) >= kMinInDomainEnergy;
  if (kept == 0) throw ConfigError("frame spec yields no element intersecting [0,1]");
  f.rows.resize(kept, L);
  long r = 0;
  for (long i = 0; i < raw.rows(); ++i) {
    if (energy(i) < kMinInDomainEnergy) continue;
    f.rows.row(r++) = raw.row(i) / std::sqrt(energy(i));
    f.descriptors.push_back(cand[i]);
  }
  return f;
}

Frame build_basis_frame(const FrameSpec& spec) {
  spec.validate();
  const long L = spec.grid_len, n = spec.basis_n;
  const Vec t = grid_points(L);
  Frame f;
  f.id = spec.id();
  f.rows.resize(n, L);
  if (spec.family == Family::Legendre) {
    // Bonnet recursion on x = 2t - 1, then scale by sqrt(2k+1).
    const Eigen::ArrayXd x = 2.0 * t.array() - 1.0;
    Eigen::ArrayXd p0 = Eigen::ArrayXd::Ones(L), p1 = x;
    for (long k = 0; k < n; ++k) {
      const Eigen::ArrayXd& pk = k == 0 ? p0 : p1;
      f.rows.row(k) = (std::sqrt(2.0 * k + 1.0) * pk).matrix().transpose();
      if (k >= 1) {
        Eigen::ArrayXd next = ((2.0 * k + 1.0) * x * p1 - static_cast<double>(k) * p0) / static_cast<double>(k + 1);
        p0 = p1;
        p1 = next;
      }
    }
  } else if (spec.family == Family::Fourier) {
    f.rows.row(0).setOnes();
    for (long i = 1; i < n; ++i) {
      const double freq = 2.0 * std::numbers::pi * static_cast<double>((i + 1) / 2);
      for (long k = 0; k < L; ++k)
        f.rows(i, k) = std::sqrt(2.0) * ((i % 2) ? std::cos(freq * t(k)) : std::sin(freq * t(k)));
    }
  } else {
    throw ConfigError("build_basis_frame needs a legendre or fourier frame spec");
  }
  f.descriptors.resize(n);
  for (long i = 0; i < n; ++i) f.descriptors[i] = {ElementKind::Basis, 0, i};
  return f;
}

Frame build_frame(const FrameSpec& spec) {
  return spec.family == Family::Daubechies ? build_wavelet_frame(spec) : build_basis_frame(spec);
}

RowMat frame_derivative(const Frame& frame) {
  if (frame.grid_len() < 3) throw ConfigError("frame_derivative needs at least 3 grid points");
  RowMat d;
  kernels::derivative_rows(frame.rows, d);
  return d;
}

}  // namespace walrus
