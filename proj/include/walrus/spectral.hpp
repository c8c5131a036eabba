#pragma once

#include "walrus/dual.hpp"
#include "walrus/safari.hpp"

namespace walrus {

constexpr double kStabilityThreshold = 1e10;
constexpr double kScoreEpsilon = 1e-6;
constexpr double kStableRealPart = -1e-8;

struct Eigendecomposition {
  CVec values;    // ascending real part, conjugate pairs adjacent (negative imaginary first)
  CMat vectors;   // unit-norm columns
  CMat inverse;
  CVec b_tilde;   // inverse * B
  Measure measure;
  double cond_v = 0.0;

  bool stable() const { return cond_v <= kStabilityThreshold; }
};

Eigendecomposition diagonalize(const SSMOperator& ssm);

struct DiagonalSSM {
  CVec lambdas;
  CVec b_tilde;
  CMat v_out;  // rows: frame coefficients, columns: kept modes
  Measure measure;
  long n_eff = 0;
  double cond_v = 0.0;
};

// Mode selection by reconstruction influence:
//   score_i = ||synthesis of mode i||_w * |b_tilde_i| / max(Re lambda_i, eps).
// Full-operator form: modes live in frame-coefficient space.
DiagonalSSM reduce_to_effective(const Eigendecomposition& decomp, const Frame& frame, const DualFrame& dual,
                                long n_eff);
// Span-operator form: modes live in span coordinates and are lifted to frame
// coefficients through span.lift.
DiagonalSSM reduce_to_effective(const Eigendecomposition& decomp, const SpanOperator& span, long n_eff);
// Keep every mode, mapping back through `to_coeffs` (identity for orthonormal bases).
DiagonalSSM full_diagonal(const Eigendecomposition& decomp, const Mat& to_coeffs);

// Indices of kept modes, highest score first, ties by original order.
std::vector<long> select_modes(const Eigendecomposition& decomp, const Vec& mode_norms, long n_eff);

}  // namespace walrus
