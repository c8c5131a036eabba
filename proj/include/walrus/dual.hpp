#pragma once

#include "walrus/frame.hpp"

namespace walrus {

// Truncated pseudo-inverse of the weighted analysis operator. With W the
// quadrature weights and Phi W^{1/2} = U S V^T (singular values above
// rcond * s_max kept), dual rows are U S^{-1} V^T W^{-1/2}.
struct DualFrame {
  RowMat rows;   // n_full x L
  Vec sigma;     // all singular values, descending (min(n_full, L) of them)
  long rank_eff = 0;
  double rcond = 0.0;
  // Factors of the kept subspace; empty when loaded from disk.
  Mat left;   // n_full x r  (U)
  Mat right;  // L x r       (V)

  bool has_factors() const { return left.cols() == rank_eff && rank_eff > 0; }
};

DualFrame dual_frame(const Frame& frame, double rcond);

// Frame coefficients c_i = <f, phi_i> under the quadrature weights.
Vec analyze(const Frame& frame, const Eigen::Ref<const Vec>& f);
// f = sum_i c_i dual_i on the frame grid.
Vec synthesize(const DualFrame& dual, const Eigen::Ref<const Vec>& c);

// Synthesis from span coordinates y = U^T c: f = span_synthesis * y with
// span_synthesis = W^{-1/2} V S^{-1}.
Mat span_synthesis(const DualFrame& dual);

long count_rank(const Vec& sigma, double rcond);

}  // namespace walrus
