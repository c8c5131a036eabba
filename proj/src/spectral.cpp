#include "walrus/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "lapack.hpp"

namespace walrus {

Eigendecomposition diagonalize(const SSMOperator& ssm) {
  const long n = ssm.n();
  if (ssm.a.rows() != n || ssm.a.cols() != n) throw ConfigError("diagonalize: A must be square and match B");
  if (!ssm.a.allFinite()) throw NumericalError("diagonalize: A has non-finite entries");
  CVec vals;
  CMat vecs;
  if (lapack::gen_eig_usable()) {
    if (!lapack::gen_eig(ssm.a, vals, vecs)) throw NumericalError("diagonalize: eigensolver did not converge");
  } else {
    Eigen::EigenSolver<Mat> es(ssm.a, true);
    if (es.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver did not converge");
    vals = es.eigenvalues();
    vecs = es.eigenvectors();
  }
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](long i, long j) {
    if (vals(i).real() != vals(j).real()) return vals(i).real() < vals(j).real();
    return vals(i).imag() < vals(j).imag();
  });

  Eigendecomposition d;
  d.measure = ssm.measure;
  d.values.resize(n);
  d.vectors.resize(n, n);
  for (long k = 0; k < n; ++k) {
    d.values(k) = vals(order[k]);
    d.vectors.col(k) = vecs.col(order[k]).normalized();
  }
  Vec sv;
  if (!lapack::singular_values(d.vectors, sv)) throw NumericalError("diagonalize: SVD of V did not converge");
  d.cond_v = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(d.cond_v) || !lapack::inverse(d.vectors, d.inverse))
    d.inverse = d.vectors.completeOrthogonalDecomposition().pseudoInverse();
  d.b_tilde = d.inverse * ssm.b.cast<std::complex<double>>();
  return d;
}

std::vector<long> select_modes(const Eigendecomposition& decomp, const Vec& mode_norms, long n_eff) {
  const long n = decomp.values.size();
  std::vector<long> stable_modes;
  for (long i = 0; i < n; ++i)
    if (decomp.values(i).real() >= kStableRealPart) stable_modes.push_back(i);
  if (n_eff < 1 || n_eff > static_cast<long>(stable_modes.size()))
    throw NumericalError("requested n_eff=" + std::to_string(n_eff) + " exceeds the " +
                         std::to_string(stable_modes.size()) + " available stable modes");
  std::vector<double> score(n, 0.0);
  for (long i : stable_modes)
    score[i] = mode_norms(i) * std::abs(decomp.b_tilde(i)) / std::max(decomp.values(i).real(), kScoreEpsilon);
  std::stable_sort(stable_modes.begin(), stable_modes.end(), [&](long a, long b) { return score[a] > score[b]; });
  stable_modes.resize(n_eff);
  return stable_modes;
}

namespace {

DiagonalSSM assemble(const Eigendecomposition& decomp, const CMat& to_coeffs, const std::vector<long>& keep) {
  DiagonalSSM out;
  out.measure = decomp.measure;
  out.cond_v = decomp.cond_v;
  out.n_eff = static_cast<long>(keep.size());
  out.lambdas.resize(out.n_eff);
  out.b_tilde.resize(out.n_eff);
  out.v_out.resize(to_coeffs.rows(), out.n_eff);
  for (long k = 0; k < out.n_eff; ++k) {
    out.lambdas(k) = decomp.values(keep[k]);
    out.b_tilde(k) = decomp.b_tilde(keep[k]);
    out.v_out.col(k) = to_coeffs * decomp.vectors.col(keep[k]);
  }
  return out;
}

}  // namespace

DiagonalSSM reduce_to_effective(const Eigendecomposition& decomp, const Frame& frame, const DualFrame& dual,
                                long n_eff) {
  if (decomp.vectors.rows() != frame.n_full()) throw ConfigError("reduce_to_effective: operator/frame size mismatch");
  if (n_eff > dual.rank_eff)
    throw ConfigError("n_eff=" + std::to_string(n_eff) + " exceeds the dual rank " + std::to_string(dual.rank_eff));
  const Vec w = quadrature_weights(frame.grid_len());
  // ||dual^T v_i||_w for every mode
  const CMat fun = dual.rows.transpose().cast<std::complex<double>>() * decomp.vectors;
  const Vec norms = (w.asDiagonal() * fun.cwiseAbs2()).colwise().sum().cwiseSqrt().transpose();
  const auto keep = select_modes(decomp, norms, n_eff);
  return assemble(decomp, CMat::Identity(frame.n_full(), frame.n_full()), keep);
}

DiagonalSSM reduce_to_effective(const Eigendecomposition& decomp, const SpanOperator& span, long n_eff) {
  if (decomp.vectors.rows() != span.op.n()) throw ConfigError("reduce_to_effective: operator/span size mismatch");
  // ||synthesis * v||_w = ||v / sigma|| because V has orthonormal columns.
  const Vec norms = (span.sigma.cwiseInverse().cast<std::complex<double>>().asDiagonal() * decomp.vectors)
                        .colwise()
                        .norm()
                        .transpose();
  const auto keep = select_modes(decomp, norms, n_eff);
  return assemble(decomp, span.lift.cast<std::complex<double>>(), keep);
}

DiagonalSSM full_diagonal(const Eigendecomposition& decomp, const Mat& to_coeffs) {
  std::vector<long> keep(decomp.values.size());
  std::iota(keep.begin(), keep.end(), 0);
  return assemble(decomp, to_coeffs.cast<std::complex<double>>(), keep);
}

}  // namespace walrus
