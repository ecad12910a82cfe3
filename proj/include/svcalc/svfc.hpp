#pragma once

#include "svcalc/core_matrix.hpp"
#include "svcalc/scalar_functions.hpp"

#include <Eigen/Eigenvalues>

#include <concepts>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace svcalc {

template <class F>
concept SingularValueMap = requires(const F &f, double x) {
    { f(x) } -> std::convertible_to<Complex>;
};

/// f_s(A) = U diag(f(sigma)) V* from an existing decomposition. Singular
/// values below tol.rank * sigma_0 contribute exactly zero.
template <SingularValueMap F>
ComplexMatrix apply_svfc(const F &f, const SingularDecomposition &dec, const Tolerances &tol = {}) {
    const Index r = dec.numerical_rank(tol.rank);
    ComplexVector fs = ComplexVector::Zero(dec.size());
    for (Index i = 0; i < r; ++i)
        fs(i) = static_cast<Complex>(f(dec.sigma(i)));
    return dec.U * fs.asDiagonal() * dec.V.adjoint();
}

template <SingularValueMap F>
ComplexMatrix apply_svfc(const F &f, const ComplexMatrix &A, const Tolerances &tol = {}) {
    return apply_svfc(f, svd(A, tol), tol);
}

/// (f(s)/s) A h for h in ker(s^2 I - A*A), s above the rank cutoff.
///
/// Throws std::invalid_argument when h mixes several singular values or lies
/// in the (numerical) kernel of A.
template <SingularValueMap F>
ComplexVector apply_kernel_formula(const F &f, const ComplexMatrix &A, const ComplexVector &h,
                                   const Tolerances &tol = {}) {
    require_finite(A, "apply_kernel_formula");
    if (h.size() != A.cols())
        throw std::invalid_argument("apply_kernel_formula: h has wrong length");
    const double hn = h.norm();
    if (!(hn > 0))
        throw std::invalid_argument("apply_kernel_formula: h must be nonzero");

    const auto dec = svd(A, tol);
    const ComplexVector gram_h = A.adjoint() * (A * h);
    const double s2 = h.dot(gram_h).real() / (hn * hn);
    const double sigma0 = dec.sigma(0);
    const double resid = (gram_h - s2 * h).norm();
    if (resid > tol.identity * std::max(1.0, sigma0 * sigma0) * hn) {
        // Report how h distributes over the distinct singular values.
        std::string parts;
        const ComplexVector coeff = dec.V.adjoint() * h;
        for (Index i = 0; i < dec.size(); ++i)
            if (std::abs(coeff(i)) > tol.identity * hn)
                parts += (parts.empty() ? "" : ", ") + std::to_string(dec.sigma(i));
        throw std::invalid_argument(
            "apply_kernel_formula: h is not in a single eigenspace of A*A; it has components "
            "along singular values {" + parts + "}");
    }
    const double s = std::sqrt(std::max(s2, 0.0));
    if (s < tol.rank * sigma0 || s == 0.0)
        throw std::invalid_argument("apply_kernel_formula: h lies in the kernel of A");
    return (static_cast<Complex>(f(s)) / s) * (A * h);
}

// ---------------------------------------------------------------------------
// Classical functional calculus on normal matrices

/// A function C -> C with g(0) = 0, used for the spectral calculus.
class PlaneFunction {
  public:
    using Fn = std::function<Complex(Complex)>;

    PlaneFunction(std::string label, Fn g) : label_(std::move(label)), g_(std::move(g)) {
        if (!g_)
            throw std::invalid_argument("PlaneFunction: empty callable");
        if (g_(Complex(0.0, 0.0)) != Complex(0.0, 0.0))
            throw std::invalid_argument("PlaneFunction: g(0) must be 0");
    }

    /// z -> alpha z^k, k >= 1.
    static PlaneFunction monomial(int k, Complex alpha = 1.0) {
        if (k < 1)
            throw std::invalid_argument("PlaneFunction::monomial: k must be >= 1");
        return PlaneFunction("monomial:k=" + std::to_string(k), [k, alpha](Complex z) {
            Complex p = 1.0;
            for (int i = 0; i < k; ++i)
                p *= z;
            return alpha * p;
        });
    }

    static PlaneFunction linear(Complex alpha) { return monomial(1, alpha); }

    /// z -> f(|z|), the radial extension of f from [0, inf).
    static PlaneFunction radial(ScalarFunction f) {
        return PlaneFunction("radial", [f = std::move(f)](Complex z) { return f(std::abs(z)); });
    }

    Complex operator()(Complex z) const { return g_(z); }

    /// Restriction to [0, inf), the input that f_s sees.
    Complex on_half_line(double x) const { return g_(Complex(x, 0.0)); }

    const std::string &label() const { return label_; }

  private:
    std::string label_;
    Fn g_;
};

inline double normality_defect(const ComplexMatrix &A) {
    return (A * A.adjoint() - A.adjoint() * A).norm();
}

inline bool is_normal(const ComplexMatrix &A, double tol) {
    return A.rows() == A.cols() && normality_defect(A) <= tol * std::max(1.0, A.squaredNorm());
}

/// Unitary diagonalisation A = Q diag(lambda) Q* of a normal matrix.
struct SpectralDecomposition {
    ComplexMatrix Q;
    ComplexVector eigenvalues;
};

inline SpectralDecomposition spectral_decomposition(const ComplexMatrix &A, const Tolerances &tol = {}) {
    require_finite(A, "spectral_decomposition");
    if (!is_normal(A, tol.identity))
        throw std::invalid_argument("spectral_decomposition: matrix is not normal");
    // Schur form of a normal matrix is diagonal; its Q stays unitary inside
    // degenerate eigenspaces, unlike a plain eigenvector solve.
    Eigen::ComplexSchur<ComplexMatrix> schur(A);
    if (schur.info() != Eigen::Success)
        throw NumericalError("spectral_decomposition: Schur iteration did not converge");
    const ComplexMatrix &T = schur.matrixT();
    const double off = T.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
    if (off > std::sqrt(tol.identity) * std::max(1.0, A.norm()))
        throw NumericalError("spectral_decomposition: Schur form is not diagonal");
    return {schur.matrixU(), T.diagonal()};
}

inline ComplexMatrix classical_fc_normal(const PlaneFunction &g, const ComplexMatrix &A,
                                         const Tolerances &tol = {}) {
    const auto sd = spectral_decomposition(A, tol);
    ComplexVector gl(sd.eigenvalues.size());
    for (Index i = 0; i < gl.size(); ++i)
        gl(i) = g(sd.eigenvalues(i));
    return sd.Q * gl.asDiagonal() * sd.Q.adjoint();
}

struct NormalComparison {
    ComplexMatrix matrix;
    ComplexMatrix fs_result;
    ComplexMatrix cfc_result;
    std::vector<Complex> eigenvalues;
    /// Per eigenvalue: g(lambda) = lambda g(|lambda|) / |lambda|. Eigenvalues
    /// treated as zero are reported as holding.
    std::vector<bool> eigen_condition_holds;
    double max_difference = 0.0;  ///< ||fs_result - cfc_result||_F
    bool results_equal = false;

    bool condition_holds_everywhere() const {
        for (bool b : eigen_condition_holds)
            if (!b)
                return false;
        return true;
    }
};

inline NormalComparison compare_normal(const PlaneFunction &g, const ComplexMatrix &A,
                                       const Tolerances &tol = {}) {
    NormalComparison out;
    out.matrix = A;
    out.cfc_result = classical_fc_normal(g, A, tol);
    out.fs_result = apply_svfc([&g](double x) { return g.on_half_line(x); }, A, tol);

    const auto sd = spectral_decomposition(A, tol);
    double lam_max = 0.0;
    for (Index i = 0; i < sd.eigenvalues.size(); ++i)
        lam_max = std::max(lam_max, std::abs(sd.eigenvalues(i)));
    for (Index i = 0; i < sd.eigenvalues.size(); ++i) {
        const Complex lam = sd.eigenvalues(i);
        out.eigenvalues.push_back(lam);
        const double m = std::abs(lam);
        if (m <= tol.rank * lam_max || m == 0.0) {
            out.eigen_condition_holds.push_back(true);
            continue;
        }
        const Complex lhs = g(lam);
        const Complex rhs = lam * g.on_half_line(m) / m;
        out.eigen_condition_holds.push_back(std::abs(lhs - rhs) <=
                                            tol.identity * std::max(1.0, std::abs(lhs)));
    }
    out.max_difference = (out.fs_result - out.cfc_result).norm();
    out.results_equal =
        out.max_difference <= tol.identity * std::max(1.0, out.cfc_result.norm());
    return out;
}

}  // namespace svcalc
