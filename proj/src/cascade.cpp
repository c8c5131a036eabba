#include "walrus/cascade.hpp"

#include "walrus/types.hpp"

#include <cmath>
#include <string>

namespace walrus {

namespace {

double sample(const std::vector<double>& v, double x, double step) {
  if (x < 0.0) return 0.0;
  const double pos = x / step;
  const double last = static_cast<double>(v.size() - 1);
  if (pos > last) return 0.0;
  if (pos == last) return v.back();
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * v[i] + f * v[i + 1];
}

// sum_m c[m] phi(2x - m) at x = i / 2^J, expressed in grid indices.
double two_scale(const std::vector<double>& c, const std::vector<double>& phi, long i, long per_unit) {
  const long last = static_cast<long>(phi.size()) - 1;
  double acc = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const long j = 2 * i - static_cast<long>(m) * per_unit;
    if (j >= 0 && j <= last) acc += c[m] * phi[j];
  }
  return std::sqrt(2.0) * acc;
}

}  // namespace

double Cascade::step() const { return std::ldexp(1.0, -levels); }
double Cascade::phi_at(double x) const { return sample(phi, x, step()); }
double Cascade::psi_at(double x) const { return sample(psi, x, step()); }

double refinement_residual(const FilterBank& bank, const std::vector<double>& phi, int levels_J) {
  const long per_unit = 1L << levels_J;
  const long n = static_cast<long>(phi.size()) - 1;
  double worst = 0.0;
  for (long i = 1; i < n; ++i)
    worst = std::max(worst, std::abs(phi[i] - two_scale(bank.h, phi, i, per_unit)));
  return worst;
}

Cascade cascade(const FilterBank& bank, int levels_J) {
  if (levels_J < 4) throw ConfigError("cascade needs levels_J >= 4, got " + std::to_string(levels_J));
  const int support = bank.taps() - 1;
  const long per_unit = 1L << levels_J;
  Cascade out;
  out.levels = levels_J;
  out.support = support;
  out.phi.assign(support * per_unit + 1, 0.0);

  if (support == 1) {
    out.phi[0] = 1.0;  // Haar: indicator of [0,1)
  } else {
    // phi(i) = sqrt2 sum_m h[m] phi(2i - m) on interior integers, normalized to sum 1.
    const int n = support - 1;
    Mat m = Mat::Zero(n, n);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const int k = 2 * i - j;
        if (k >= 0 && k < bank.taps()) m(i - 1, j - 1) = std::sqrt(2.0) * bank.h[k];
      }
    Mat sys = m - Mat::Identity(n, n);
    sys.row(n - 1).setOnes();
    Vec rhs = Vec::Zero(n);
    rhs(n - 1) = 1.0;
    const Vec ints = sys.fullPivLu().solve(rhs);
    const double eig_res = (m * ints - ints).cwiseAbs().maxCoeff();
    if (!(eig_res < kCascadeTolerance))
      throw NumericalError("cascade: integer-point eigenproblem residual " + std::to_string(eig_res), eig_res);
    for (int i = 1; i <= n; ++i) out.phi[i * per_unit] = ints(i - 1);
  }

  for (int level = 1; level <= levels_J; ++level) {
    const long stride = 1L << (levels_J - level);
    for (long i = stride; i < static_cast<long>(out.phi.size()); i += 2 * stride)
      out.phi[i] = two_scale(bank.h, out.phi, i, per_unit);
  }

  out.psi.assign(out.phi.size(), 0.0);
  for (long i = 0; i < static_cast<long>(out.psi.size()); ++i) out.psi[i] = two_scale(bank.g, out.phi, i, per_unit);

  out.residual = refinement_residual(bank, out.phi, levels_J);
  if (!(out.residual < kCascadeTolerance))
    throw NumericalError("cascade did not converge: refinement residual " + std::to_string(out.residual), out.residual);
  return out;
}

}  // namespace walrus
