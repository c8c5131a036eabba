#include "lapack.hpp"

#include <complex>
#include <vector>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cctype>
#include <string>

extern "C" char* openblas_get_corename();

namespace walrus::lapack {

bool gen_eig_usable() {
  static const bool ok = [] {
    const char* name = openblas_get_corename();
    std::string core = name ? name : "";
    for (auto& c : core) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return core != "cooperlake";
  }();
  return ok;
}

bool sym_eig(const Mat& a, Vec& values, Mat& vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  vectors = a;
  values.resize(n);
  return LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, vectors.data(), n, values.data()) == 0;
}

bool gen_eig(const Mat& a, CVec& values, CMat& vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Mat work = a, vr(n, n);
  Vec wr(n), wi(n);
  double dummy = 0.0;
  if (LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, wr.data(), wi.data(), &dummy, 1, vr.data(), n) != 0)
    return false;
  values.resize(n);
  vectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    values(j) = {wr(j), wi(j)};
    if (wi(j) != 0.0 && j + 1 < n) {
      // conjugate pair stored as (re, im) columns
      values(j + 1) = {wr(j + 1), wi(j + 1)};
      for (lapack_int i = 0; i < n; ++i) {
        vectors(i, j) = {vr(i, j), vr(i, j + 1)};
        vectors(i, j + 1) = {vr(i, j), -vr(i, j + 1)};
      }
      ++j;
    } else {
      vectors.col(j) = vr.col(j).cast<std::complex<double>>();
    }
  }
  return true;
}

bool singular_values(const CMat& a, Vec& sv) {
  const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  CMat work = a;
  sv.resize(std::min(m, n));
  std::complex<double> dummy{};
  return LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m,
                        sv.data(), &dummy, 1, &dummy, 1) == 0;
}

bool inverse(const CMat& a, CMat& inv) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  inv = a;
  std::vector<lapack_int> piv(n);
  auto* p = inv.data();
  if (LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, p, n, piv.data()) != 0) return false;
  return LAPACKE_zgetri(LAPACK_COL_MAJOR, n, p, n, piv.data()) == 0;
}

}  // namespace walrus::lapack
