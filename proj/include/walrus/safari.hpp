#pragma once

#include "walrus/dual.hpp"
#include "walrus/frame.hpp"

#include <string>

namespace walrus {

enum class Construction { NumericalSaFARi, ClosedFormHiPPO };
enum class HippoKind { LegS, LegT, FouS, FouT };

std::string hippo_name(HippoKind k);
HippoKind parse_hippo(const std::string& s);

// dc/dt = -(1/T)(A c - B u) for the scaled measure, -(1/theta)(A c - B u) for
// the translated one. A and B exclude the 1/T, 1/theta factors.
struct SSMOperator {
  Mat a;
  Vec b;
  Measure measure;
  std::string frame_id;
  Construction construction = Construction::NumericalSaFARi;

  long n() const { return b.size(); }
};

// A = I + int t phi_i'(t) dual_j(t) dt, B = phi(1).
SSMOperator build_scaled_ssm(const Frame& frame, const DualFrame& dual, const RowMat& dframe);
// A = phi_i(0) dual_j(0) + int phi_i'(t) dual_j(t) dt, B = phi(1).
SSMOperator build_translated_ssm(const Frame& frame, const DualFrame& dual, const RowMat& dframe, long theta);
// Quadrature part of the scaled construction alone (A - I).
Mat scaled_quadrature_term(const Frame& frame, const DualFrame& dual, const RowMat& dframe);

// Closed forms for the Legendre and Fourier bases. theta is used by the
// translated kinds only.
SSMOperator build_hippo_closed_form(HippoKind kind, long n, long theta = 1);

// The operator restricted to the kept span of a redundant frame, in the
// coordinates y = U^T c (c = lift * y, f = synthesis * y). Its spectrum is
// the nontrivial spectrum of the full operator; the modes it drops have no
// effect on reconstruction. This avoids ever forming n_full x n_full matrices.
struct SpanOperator {
  SSMOperator op;   // r x r
  Mat lift;         // n_full x r, frame coefficients from span coordinates
  Mat synthesis;    // L x r, function samples from span coordinates
  Vec sigma;        // kept singular values; f has weighted norm ||y / sigma||
};

SpanOperator build_span_ssm(const Frame& frame, const DualFrame& dual, const RowMat& dframe, const Measure& m);

}  // namespace walrus
