#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace svcalc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a numerical routine cannot produce a trustworthy result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tolerances shared across the library. All must be strictly positive.
struct Tolerances {
    double orth = 1e-10;      ///< U*U = I, V*V = I
    double recon = 1e-10;     ///< U diag(sigma) V* = A, relative to ||A||_F
    double rank = 1e-12;      ///< sigma_i < rank * sigma_0 is treated as 0
    double identity = 1e-9;   ///< equality of two matrix results

    void validate() const {
        for (double t : {orth, recon, rank, identity})
            if (!(t > 0) || !std::isfinite(t))
                throw std::invalid_argument("Tolerances: all tolerances must be finite and > 0");
    }
};

inline bool all_finite(const ComplexMatrix &A) {
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
            if (!std::isfinite(A(i, j).real()) || !std::isfinite(A(i, j).imag()))
                return false;
    return true;
}

inline void require_finite(const ComplexMatrix &A, const char *what) {
    if (A.rows() < 1 || A.cols() < 1)
        throw std::invalid_argument(std::string(what) + ": matrix must be non-empty");
    if (!all_finite(A))
        throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
}

/// Thin singular value decomposition A = U diag(sigma) V*.
///
/// U is rows x r, V is cols x r with r = min(rows, cols); sigma is
/// descending and nonnegative. Ties keep the order produced by the solver.
struct SingularDecomposition {
    ComplexMatrix U;
    RealVector sigma;
    ComplexMatrix V;

    Index size() const { return sigma.size(); }

    ComplexMatrix reconstruct() const { return U * sigma.asDiagonal() * V.adjoint(); }

    /// Number of singular values at or above the relative cutoff.
    Index numerical_rank(double tol_rank) const {
        if (sigma.size() == 0 || sigma(0) == 0.0)
            return 0;
        const double cutoff = tol_rank * sigma(0);
        Index r = 0;
        while (r < sigma.size() && sigma(r) >= cutoff)
            ++r;
        return r;
    }
};

inline double orthonormality_error(const ComplexMatrix &Q) {
    return (Q.adjoint() * Q - ComplexMatrix::Identity(Q.cols(), Q.cols())).norm();
}

/// Computes the thin SVD with one-sided Jacobi rotations.
///
/// Throws NumericalError if the solver reports failure or the factors come
/// back non-finite, non-orthonormal, or fail to reconstruct A.
inline SingularDecomposition svd(const ComplexMatrix &A, const Tolerances &tol = {}) {
    require_finite(A, "svd");
    Eigen::JacobiSVD<ComplexMatrix> solver(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success)
        throw NumericalError("svd: Jacobi iteration did not converge");

    SingularDecomposition out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    if (!all_finite(out.U) || !all_finite(out.V) || !out.sigma.allFinite())
        throw NumericalError("svd: non-finite factors");

    // Eigen already sorts descending; keep the check as the contract.
    for (Index i = 0; i < out.sigma.size(); ++i) {
        if (out.sigma(i) < 0)
            throw NumericalError("svd: negative singular value");
        if (i > 0 && out.sigma(i) > out.sigma(i - 1))
            throw NumericalError("svd: singular values not descending");
    }

    const double scale = std::max(1.0, A.norm());
    if (orthonormality_error(out.U) > tol.orth || orthonormality_error(out.V) > tol.orth)
        throw NumericalError("svd: singular vectors not orthonormal within tolerance");
    if ((out.reconstruct() - A).norm() > tol.recon * scale)
        throw NumericalError("svd: reconstruction error above tolerance");
    return out;
}

inline double frobenius_norm(const ComplexMatrix &A) {
    require_finite(A, "frobenius_norm");
    return A.norm();
}

inline ComplexMatrix hadamard(const ComplexMatrix &A, const ComplexMatrix &B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("hadamard: shape mismatch");
    return A.cwiseProduct(B);
}

// ---------------------------------------------------------------------------
// Random test inputs. All generators are caller-owned.

using Rng = std::mt19937_64;

/// Generator for trial `index` of a run seeded with `seed`; independent of
/// the order in which trials are evaluated.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

/// Matrix with i.i.d. standard complex Gaussian entries times `scale`.
inline ComplexMatrix random_gaussian(Index rows, Index cols, Rng &rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale / std::sqrt(2.0));
    ComplexMatrix G(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            G(i, j) = Complex(re, im);
        }
    return G;
}

/// Haar-distributed unitary via QR of a Gaussian matrix with the phases of
/// R's diagonal folded back into Q.
inline ComplexMatrix random_unitary(Index d, Rng &rng) {
    if (d < 1)
        throw std::invalid_argument("random_unitary: d must be >= 1");
    const ComplexMatrix G = random_gaussian(d, d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(G);
    ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(d, d);
    const ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < d; ++k) {
        const double r = std::abs(R(k, k));
        if (r > 0)
            Q.col(k) *= R(k, k) / r;
    }
    return Q;
}

inline ComplexMatrix random_unitary(Index d, std::uint64_t seed) {
    Rng rng = trial_rng(seed, 0, 0x5eed);
    return random_unitary(d, rng);
}

}  // namespace svcalc
