#include "walrus/dual.hpp"

#include <cmath>

#include "lapack.hpp"

namespace walrus {

long count_rank(const Vec& sigma, double rcond) {
  if (sigma.size() == 0) return 0;
  const double cut = rcond * sigma.maxCoeff();
  long r = 0;
  for (double s : sigma) r += s > cut;
  return r;
}

DualFrame dual_frame(const Frame& frame, double rcond) {
  const long n = frame.n_full(), L = frame.grid_len();
  if (n == 0 || L == 0) throw ConfigError("dual_frame: empty frame");
  if (!(rcond > 0.0 && rcond <= 1.0)) throw ConfigError("dual_frame: rcond must lie in (0, 1]");
  const Vec w = quadrature_weights(L);
  const Eigen::ArrayXd sw = w.array().sqrt();
  const Mat fs = frame.rows * sw.matrix().asDiagonal();

  // Eigen-decompose the Gram matrix on the smaller side.
  const bool tall_side = n <= L;
  const Mat gram = tall_side ? Mat(fs * fs.transpose()) : Mat(fs.transpose() * fs);
  Vec evals;
  Mat evecs;
  if (!lapack::sym_eig(gram, evals, evecs)) throw NumericalError("dual_frame: Gram eigensolver failed");
  const long m = gram.rows();
  DualFrame d;
  d.rcond = rcond;
  d.sigma.resize(m);
  for (long i = 0; i < m; ++i) d.sigma(i) = std::sqrt(std::max(evals(m - 1 - i), 0.0));
  d.rank_eff = count_rank(d.sigma, rcond);
  if (d.rank_eff == 0)
    throw NumericalError("degenerate frame: every singular value is below rcond * sigma_max", d.sigma(0));

  const long r = d.rank_eff;
  const Mat vecs = evecs.rowwise().reverse().leftCols(r);
  const Vec s = d.sigma.head(r);
  if (tall_side) {
    d.left = vecs;
    d.right = fs.transpose() * vecs * s.cwiseInverse().asDiagonal();
  } else {
    d.right = vecs;
    d.left = fs * vecs * s.cwiseInverse().asDiagonal();
  }
  // dual = U S^{-1} V^T W^{-1/2}
  d.rows = d.left * s.cwiseInverse().asDiagonal() * d.right.transpose() * sw.inverse().matrix().asDiagonal();
  return d;
}

Vec analyze(const Frame& frame, const Eigen::Ref<const Vec>& f) {
  const Vec w = quadrature_weights(frame.grid_len());
  return frame.rows * w.cwiseProduct(f);
}

Vec synthesize(const DualFrame& dual, const Eigen::Ref<const Vec>& c) { return dual.rows.transpose() * c; }

Mat span_synthesis(const DualFrame& dual) {
  if (!dual.has_factors()) throw ConfigError("dual frame carries no span factors; rebuild it with dual_frame");
  const Vec w = quadrature_weights(dual.right.rows());
  return w.array().rsqrt().matrix().asDiagonal() * dual.right * dual.sigma.head(dual.rank_eff).cwiseInverse().asDiagonal();
}

}  // namespace walrus
