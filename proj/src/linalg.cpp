#include "mcindex/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace mcindex {

namespace {

// Bunch-Kaufman pivot constant.
constexpr double kBkAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8

} // namespace

Inertia inertia_dense(const Mat& A_in, double zero_tol) {
    const int n = static_cast<int>(A_in.rows());
    if (A_in.cols() != n) throw std::invalid_argument("inertia_dense: matrix not square");
    Mat A = 0.5 * (A_in + A_in.transpose());
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    const double tol = zero_tol * scale;

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    auto swap_rows_cols = [&](int i, int j) {
        if (i == j) return;
        A.row(i).swap(A.row(j));
        A.col(i).swap(A.col(j));
        std::swap(perm[i], perm[j]);
    };

    Inertia out;
    int k = 0;
    while (k < n) {
        const int m = n - k;
        if (m == 1) {
            const double d = A(k, k);
            if (std::abs(d) <= tol) ++out.zero;
            else if (d < 0) ++out.neg;
            else ++out.pos;
            break;
        }
        // Largest off-diagonal magnitude in column k of the trailing block.
        int r = k + 1;
        double lambda = 0.0;
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(A(i, k));
            if (v > lambda) { lambda = v; r = i; }
        }
        const double akk = std::abs(A(k, k));

        bool use_1x1 = false;
        bool pivot_is_r = false;
        if (lambda <= tol && akk <= tol) {
            // Whole column negligible: zero eigenvalue direction.
            ++out.zero;
            ++k;
            continue;
        }
        if (akk >= kBkAlpha * lambda) {
            use_1x1 = true;
        } else {
            double sigma = 0.0;
            for (int i = k; i < n; ++i)
                if (i != r) sigma = std::max(sigma, std::abs(A(i, r)));
            if (akk * sigma >= kBkAlpha * lambda * lambda) {
                use_1x1 = true;
            } else if (std::abs(A(r, r)) >= kBkAlpha * sigma) {
                use_1x1 = true;
                pivot_is_r = true;
            }
        }

        if (use_1x1) {
            if (pivot_is_r) swap_rows_cols(k, r);
            const double d = A(k, k);
            if (std::abs(d) <= tol) {
                // Degenerate pivot in spite of the search; count as zero and
                // drop the row/column without elimination.
                ++out.zero;
                ++k;
                continue;
            }
            if (d < 0) ++out.neg; else ++out.pos;
            const Vec col = A.block(k + 1, k, m - 1, 1);
            A.block(k + 1, k + 1, m - 1, m - 1).noalias() -= col * col.transpose() / d;
            ++k;
        } else {
            swap_rows_cols(k + 1, r);
            // 2x2 pivot [a b; b c].
            const double a = A(k, k), b = A(k + 1, k), c = A(k + 1, k + 1);
            const double det = a * c - b * b;
            const double tr = a + c;
            // Inertia of the 2x2 pivot.
            if (det < 0) { ++out.neg; ++out.pos; }
            else if (tr < 0) out.neg += 2;
            else out.pos += 2;
            if (m > 2) {
                Mat piv(2, 2);
                piv << a, b, b, c;
                const Mat U = A.block(k + 2, k, m - 2, 2);
                A.block(k + 2, k + 2, m - 2, m - 2).noalias() -=
                    U * piv.inverse() * U.transpose();
            }
            k += 2;
        }
    }
    return out;
}

Inertia inertia_eigen(const Mat& A, double zero_tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    Inertia out;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (std::abs(lam) <= zero_tol * scale) ++out.zero;
        else if (lam < 0) ++out.neg;
        else ++out.pos;
    }
    return out;
}

Mat BlockTridiag::dense() const {
    const int nb = nblocks();
    const int bs = block_size();
    Mat out = Mat::Zero(nb * bs, nb * bs);
    for (int kk = 0; kk < nb; ++kk) {
        out.block(kk * bs, kk * bs, bs, bs) = diag[kk];
        if (kk + 1 < nb) {
            out.block(kk * bs, (kk + 1) * bs, bs, bs) = off[kk];
            out.block((kk + 1) * bs, kk * bs, bs, bs) = off[kk].transpose();
        }
    }
    return out;
}

BlockTridiag& BlockTridiag::add_scaled(const BlockTridiag& other, double scale) {
    for (int kk = 0; kk < nblocks(); ++kk) {
        diag[kk] += scale * other.diag[kk];
        if (kk + 1 < nblocks()) off[kk] += scale * other.off[kk];
    }
    return *this;
}

Inertia inertia_block_tridiag(const BlockTridiag& A, double zero_tol, bool* breakdown) {
    if (breakdown) *breakdown = false;
    Inertia out;
    const int nb = A.nblocks();
    if (nb == 0) return out;
    double scale = 0.0;
    for (const auto& d : A.diag) scale = std::max(scale, d.cwiseAbs().maxCoeff());
    scale = std::max(scale, 1e-300);

    Mat S = A.diag[0];
    for (int kk = 0; kk < nb; ++kk) {
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
        double min_abs = std::numeric_limits<double>::max();
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double lam = es.eigenvalues()[i];
            min_abs = std::min(min_abs, std::abs(lam));
            if (std::abs(lam) <= zero_tol * scale) ++out.zero;
            else if (lam < 0) ++out.neg;
            else ++out.pos;
        }
        if (kk + 1 < nb) {
            if (min_abs <= zero_tol * scale) {
                // Singular pivot block: the Schur recursion is unreliable.
                if (breakdown) *breakdown = true;
                return out;
            }
            const Mat& E = A.off[kk];
            S = A.diag[kk + 1] - E.transpose() * es.eigenvectors() *
                es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose() * E;
        }
    }
    return out;
}

Mat orthonormal_columns(const Mat& A, double rank_tol) {
    if (A.cols() == 0) return A;
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    qr.setThreshold(rank_tol);
    const int r = static_cast<int>(qr.rank());
    Mat Q = qr.householderQ() * Mat::Identity(A.rows(), r);
    return Q;
}

int subspace_intersection_dim(const Mat& X, const Mat& Y, double rank_tol) {
    const Mat QX = orthonormal_columns(X);
    const Mat QY = orthonormal_columns(Y);
    if (QX.cols() == 0 || QY.cols() == 0) return 0;
    Mat XY(QX.rows(), QX.cols() + QY.cols());
    XY << QX, QY;
    Eigen::JacobiSVD<Mat> svd(XY);
    int rank_sum = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > rank_tol) ++rank_sum;
    return static_cast<int>(QX.cols() + QY.cols()) - rank_sum;
}

} // namespace mcindex
