#pragma once

#include <vector>

#include "mcindex/types.hpp"

namespace mcindex {

/// Signature of a symmetric matrix: (negative, zero, positive) counts.
struct Inertia {
    int neg = 0;
    int zero = 0;
    int pos = 0;
};

/// Inertia of a dense symmetric matrix by Bunch-Kaufman LDL^T with
/// partial pivoting.  Eigenvalues with |lambda| below zero_tol (relative
/// to the matrix scale) are counted as zero.
Inertia inertia_dense(const Mat& A, double zero_tol = 1e-11);

/// Inertia from a dense eigendecomposition; oracle counterpart of
/// inertia_dense.
Inertia inertia_eigen(const Mat& A, double zero_tol = 1e-11);

/// Symmetric block-tridiagonal matrix with square blocks of equal size.
/// diag[k] is the k-th diagonal block, off[k] couples block rows k and
/// k+1 (A_{k,k+1} = off[k]).
struct BlockTridiag {
    std::vector<Mat> diag;
    std::vector<Mat> off;

    int nblocks() const { return static_cast<int>(diag.size()); }
    int block_size() const { return diag.empty() ? 0 : static_cast<int>(diag.front().rows()); }
    int dim() const { return nblocks() * block_size(); }

    Mat dense() const;
    BlockTridiag& add_scaled(const BlockTridiag& other, double scale);
};

/// Inertia via the block LDL^T (Schur complement) recursion.  Sets
/// *breakdown when a pivot block is numerically singular; the returned
/// counts are then unreliable and the caller should perturb and retry.
Inertia inertia_block_tridiag(const BlockTridiag& A, double zero_tol = 1e-11,
                              bool* breakdown = nullptr);

/// Thin-QR orthonormal basis of the column span (columns with negligible
/// norm dropped).
Mat orthonormal_columns(const Mat& A, double rank_tol = 1e-12);

/// dim(span X  ∩  span Y) via rank([X Y]); inputs need not be orthonormal.
int subspace_intersection_dim(const Mat& X, const Mat& Y, double rank_tol = 1e-8);

/// Orthogonal projector onto the column span of an orthonormal basis.
inline Mat projector(const Mat& Q) { return Q * Q.transpose(); }

} // namespace mcindex
