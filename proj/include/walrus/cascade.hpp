#pragma once

#include "walrus/filters.hpp"

#include <vector>

namespace walrus {

// Father and mother wavelets sampled at x = k / 2^J, k = 0 .. (2p-1) 2^J.
struct Cascade {
  int levels = 0;
  std::vector<double> phi;
  std::vector<double> psi;
  double support = 0.0;  // 2p - 1
  double residual = 0.0;  // two-scale refinement residual over interior points

  double step() const;
  // Linear interpolation; zero outside [0, support].
  double phi_at(double x) const;
  double psi_at(double x) const;
};

constexpr double kCascadeTolerance = 1e-6;

// Exact dyadic evaluation: integer samples from the eigenvector of the refinement
// operator, then one refinement pass per level. Throws NumericalError if the
// refinement residual exceeds kCascadeTolerance.
Cascade cascade(const FilterBank& bank, int levels_J);

// max_k |phi(k/2^J) - sqrt2 sum_m h[m] phi(2k/2^J - m)| over interior k.
double refinement_residual(const FilterBank& bank, const std::vector<double>& phi, int levels_J);

}  // namespace walrus
