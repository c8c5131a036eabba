#pragma once
// Thin LAPACKE wrappers for the large dense decompositions.

#include "walrus/types.hpp"

namespace walrus::lapack {

// Symmetric eigendecomposition, eigenvalues ascending. Returns false on failure.
bool sym_eig(const Mat& a, Vec& values, Mat& vectors);

// False when the loaded OpenBLAS kernel set is one whose dgeev can stall
// (seen with 0.3.20 Cooperlake kernels). Callers fall back to Eigen.
bool gen_eig_usable();

// General real eigendecomposition with right eigenvectors.
bool gen_eig(const Mat& a, CVec& values, CMat& vectors);

// Singular values only, descending.
bool singular_values(const CMat& a, Vec& sv);

// Inverse through LU with partial pivoting.
bool inverse(const CMat& a, CMat& inv);

}  // namespace walrus::lapack
