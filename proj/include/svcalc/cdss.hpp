#pragma once

// Complex doubly substochastic (cdss) matrices: every row and column has
// l1-sum <= 1. They are exactly the convex hull of the permutation-phase
// matrices M_{pi,gamma}, which hold gamma_j at (j, pi(j)) and zero elsewhere.

#include "svcalc/core_matrix.hpp"
#include "svcalc/scalar_functions.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace svcalc {

struct NotCdssError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Permutation with a unimodular phase per row. `perm` is 0-based.
struct PermutationPhase {
    std::vector<Index> perm;
    std::vector<Complex> phases;

    Index dimension() const { return static_cast<Index>(perm.size()); }

    void validate() const {
        const std::size_t d = perm.size();
        if (d == 0 || phases.size() != d)
            throw std::invalid_argument("PermutationPhase: perm and phases must have equal nonzero length");
        std::vector<bool> seen(d, false);
        for (Index p : perm) {
            if (p < 0 || static_cast<std::size_t>(p) >= d || seen[p])
                throw std::invalid_argument("PermutationPhase: perm is not a bijection");
            seen[p] = true;
        }
        for (const Complex &g : phases)
            if (std::abs(std::abs(g) - 1.0) > 1e-12)
                throw std::invalid_argument("PermutationPhase: phases must be unimodular");
    }

    static PermutationPhase identity(Index d, Complex phase = 1.0) {
        PermutationPhase pp;
        pp.perm.resize(d);
        std::iota(pp.perm.begin(), pp.perm.end(), Index{0});
        pp.phases.assign(d, phase);
        return pp;
    }
};

inline ComplexMatrix pp_to_matrix(const PermutationPhase &pp) {
    pp.validate();
    const Index d = pp.dimension();
    ComplexMatrix M = ComplexMatrix::Zero(d, d);
    for (Index j = 0; j < d; ++j)
        M(j, pp.perm[j]) = pp.phases[j];
    return M;
}

inline ComplexMatrix pp_to_matrix(const PermutationPhase &pp, Index d) {
    if (pp.dimension() != d)
        throw std::invalid_argument("pp_to_matrix: dimension mismatch");
    return pp_to_matrix(pp);
}

struct CdssTerm {
    double weight = 0.0;
    PermutationPhase pp;
};

struct CdssDecomposition {
    Index dimension = 0;
    std::vector<CdssTerm> terms;

    double weight_sum() const {
        double s = 0.0;
        for (const auto &t : terms)
            s += t.weight;
        return s;
    }

    ComplexMatrix reconstruct() const {
        ComplexMatrix M = ComplexMatrix::Zero(dimension, dimension);
        for (const auto &t : terms)
            for (Index j = 0; j < dimension; ++j)
                M(j, t.pp.perm[j]) += t.weight * t.pp.phases[j];
        return M;
    }
};

/// Largest row or column l1-sum.
inline double max_line_sum(const ComplexMatrix &M) {
    const Eigen::MatrixXd mod = M.cwiseAbs();
    return std::max(mod.rowwise().sum().maxCoeff(), mod.colwise().sum().maxCoeff());
}

inline bool is_cdss(const ComplexMatrix &M, double tol = 0.0) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("is_cdss: matrix must be square");
    require_finite(M, "is_cdss");
    return max_line_sum(M) <= 1.0 + tol;
}

/// Upper bound on terms emitted by decompose() for a d x d input: two
/// terms per Birkhoff round on the 2d x 2d completion, plus the canceling
/// pair that absorbs residual weight.
inline std::size_t max_decomposition_terms(Index d) {
    const std::size_t n = 2 * static_cast<std::size_t>(d);
    return 2 * (n * n - 2 * n + 2) + 2;
}

struct DecomposeOptions {
    double tol_support = 1e-13;  ///< entries at or below this are outside the support
    double tol_drop = 1e-15;     ///< extracted weights below this are folded into the residual
};

namespace detail {

/// Perfect matching on the support of a nonnegative square matrix, kept
/// across Birkhoff rounds and repaired by augmenting paths.
class SupportMatching {
  public:
    explicit SupportMatching(const Eigen::MatrixXd &R, double tol)
        : R_(R), tol_(tol), n_(R.rows()), row_to_col_(n_, -1), col_to_row_(n_, -1) {}

    bool complete() {
        for (Index r = 0; r < n_; ++r) {
            if (row_to_col_[r] >= 0)
                continue;
            visited_.assign(n_, false);
            if (!augment(r))
                return false;
        }
        return true;
    }

    void unmatch_row(Index r) {
        const Index c = row_to_col_[r];
        if (c >= 0)
            col_to_row_[c] = -1;
        row_to_col_[r] = -1;
    }

    const std::vector<Index> &row_to_col() const { return row_to_col_; }

  private:
    bool in_support(Index r, Index c) const { return R_(r, c) > tol_; }

    // Kuhn's augmenting path from row r.
    bool augment(Index r) {
        for (Index c = 0; c < n_; ++c) {
            if (visited_[c] || !in_support(r, c))
                continue;
            visited_[c] = true;
            if (col_to_row_[c] < 0 || augment(col_to_row_[c])) {
                row_to_col_[r] = c;
                col_to_row_[c] = r;
                return true;
            }
        }
        return false;
    }

    const Eigen::MatrixXd &R_;
    double tol_;
    Index n_;
    std::vector<Index> row_to_col_;
    std::vector<Index> col_to_row_;
    std::vector<bool> visited_;
};

/// Accumulates terms, merging identical permutation-phase matrices.
class TermAccumulator {
  public:
    explicit TermAccumulator(Index d) : d_(d) {}

    // `slot[j]` is 0 for a phase taken from the input, +1/-1 for a completed row.
    void add(double w, std::vector<Index> perm, std::vector<Complex> phases, std::vector<int> slot) {
        Key key{perm, std::move(slot)};
        auto it = index_.find(key);
        if (it != index_.end()) {
            terms_[it->second].weight += w;
            return;
        }
        index_.emplace(std::move(key), terms_.size());
        terms_.push_back({w, {std::move(perm), std::move(phases)}});
    }

    void add_canceling_pair(double w) {
        std::vector<Index> id(d_);
        std::iota(id.begin(), id.end(), Index{0});
        add(0.5 * w, id, std::vector<Complex>(d_, 1.0), std::vector<int>(d_, +1));
        add(0.5 * w, id, std::vector<Complex>(d_, -1.0), std::vector<int>(d_, -1));
    }

    std::vector<CdssTerm> take() { return std::move(terms_); }

  private:
    using Key = std::pair<std::vector<Index>, std::vector<int>>;
    Index d_;
    std::map<Key, std::size_t> index_;
    std::vector<CdssTerm> terms_;
};

}  // namespace detail

/// Writes a cdss matrix as a convex combination of permutation-phase matrices.
///
/// The moduli |m_jk| form a nonnegative doubly substochastic matrix P, which
/// is embedded in the doubly stochastic [[P, D_r], [D_c, P^T]] with diagonal
/// slacks D_r = I - diag(row sums), D_c = I - diag(column sums). Greedy
/// Birkhoff-von Neumann extraction on the embedding yields permutations whose
/// top-left restriction is a partial permutation of P. Each partial
/// permutation is completed by pairing its free rows and columns in order,
/// and emitted twice at half weight with phases +1 and -1 on the completed
/// positions, so those entries cancel. Matched positions carry the phase of
/// the input entry.
inline CdssDecomposition decompose(const ComplexMatrix &M, double tol = 1e-12,
                                   const DecomposeOptions &opts = {}) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("decompose: matrix must be square");
    if (!is_cdss(M, tol))
        throw NotCdssError("decompose: matrix is not complex doubly substochastic (max line sum " +
                           std::to_string(max_line_sum(M)) + ")");
    const Index d = M.rows();
    const Index n = 2 * d;

    Eigen::MatrixXd P = M.cwiseAbs();
    const double excess = max_line_sum(M);
    if (excess > 1.0)
        P /= excess;  // within tol of the cdss set; pull back onto it
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            if (P(i, j) <= opts.tol_support)
                P(i, j) = 0.0;

    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    R.topLeftCorner(d, d) = P;
    R.bottomRightCorner(d, d) = P.transpose();
    for (Index i = 0; i < d; ++i) {
        R(i, d + i) = std::max(0.0, 1.0 - P.row(i).sum());
        R(d + i, i) = std::max(0.0, 1.0 - P.col(i).sum());
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (R(i, j) <= opts.tol_support)
                R(i, j) = 0.0;

    detail::TermAccumulator acc(d);
    detail::SupportMatching matching(R, opts.tol_support);
    double extracted = 0.0;
    // Every round zeroes at least one support entry.
    const std::size_t max_rounds = static_cast<std::size_t>(n) * n;

    for (std::size_t round = 0; round < max_rounds; ++round) {
        if (R.maxCoeff() <= opts.tol_support)
            break;
        if (!matching.complete())
            break;  // residual is below resolution of the support test
        const auto &sigma = matching.row_to_col();
        double w = kInfinity;
        for (Index r = 0; r < n; ++r)
            w = std::min(w, R(r, sigma[r]));

        if (w >= opts.tol_drop) {
            std::vector<Index> perm(d, -1);
            std::vector<Complex> phases(d, 1.0);
            std::vector<int> slot(d, 0);
            std::vector<bool> col_used(d, false);
            std::vector<Index> free_rows;
            for (Index j = 0; j < d; ++j) {
                const Index k = sigma[j];
                if (k < d) {
                    perm[j] = k;
                    phases[j] = M(j, k) / std::abs(M(j, k));
                    col_used[k] = true;
                } else {
                    free_rows.push_back(j);
                }
            }
            if (free_rows.empty()) {
                acc.add(w, perm, phases, slot);
            } else {
                std::size_t next = 0;
                for (Index k = 0; k < d; ++k)
                    if (!col_used[k]) {
                        perm[free_rows[next]] = k;
                        slot[free_rows[next]] = 1;
                        ++next;
                    }
                auto neg_phases = phases;
                auto neg_slot = slot;
                for (Index j : free_rows) {
                    neg_phases[j] = -1.0;
                    neg_slot[j] = -1;
                }
                acc.add(0.5 * w, perm, phases, slot);
                acc.add(0.5 * w, perm, std::move(neg_phases), std::move(neg_slot));
            }
            extracted += w;
        }
        for (Index r = 0; r < n; ++r) {
            double &entry = R(r, sigma[r]);
            entry -= w;
            if (entry <= opts.tol_support) {
                entry = 0.0;
                matching.unmatch_row(r);
            }
        }
    }

    const double residual_weight = 1.0 - extracted;
    if (residual_weight > 0.0)
        acc.add_canceling_pair(residual_weight);

    CdssDecomposition out{d, acc.take()};
    // Exact unit sum: absorb rounding into the largest weight.
    auto largest = std::max_element(out.terms.begin(), out.terms.end(),
                                    [](const CdssTerm &a, const CdssTerm &b) { return a.weight < b.weight; });
    largest->weight += 1.0 - out.weight_sum();
    return out;
}

// ---------------------------------------------------------------------------
// Frobenius distance identity

/// conj(V_B* V_A) . (U_B* U_A), the cdss matrix coupling two SVDs.
inline ComplexMatrix alignment_matrix(const SingularDecomposition &a, const SingularDecomposition &b) {
    return hadamard((b.V.adjoint() * a.V).conjugate(), b.U.adjoint() * a.U);
}

/// sum_n c_n sum_i |g(s_i(B)) - gamma_{n,i} g(s_{pi_n(i)}(A))|^2 for given
/// transformed singular values.
inline double decomposed_distance(const CdssDecomposition &dec, const std::vector<Complex> &gA,
                                  const std::vector<Complex> &gB) {
    double total = 0.0;
    for (const auto &t : dec.terms) {
        double term = 0.0;
        for (Index i = 0; i < dec.dimension; ++i)
            term += std::norm(gB[i] - t.pp.phases[i] * gA[t.pp.perm[i]]);
        total += t.weight * term;
    }
    return total;
}

struct DistanceIdentity {
    double lhs = 0.0;  ///< ||A - B||_F^2
    double rhs = 0.0;  ///< weighted sum over the decomposition of the alignment matrix
    CdssDecomposition decomposition;
    RealVector sigma_a;
    RealVector sigma_b;

    bool holds(double tol) const { return std::abs(lhs - rhs) <= tol * (1.0 + lhs); }
};

inline DistanceIdentity distance_identity_check(const ComplexMatrix &A, const ComplexMatrix &B,
                                                const Tolerances &tol = {}) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw std::invalid_argument("distance_identity_check: A and B must be square of equal size");
    const auto sa = svd(A, tol);
    const auto sb = svd(B, tol);
    DistanceIdentity out;
    out.decomposition = decompose(alignment_matrix(sa, sb), 1e-10);
    out.sigma_a = sa.sigma;
    out.sigma_b = sb.sigma;
    out.lhs = (A - B).squaredNorm();
    std::vector<Complex> ga(sa.sigma.begin(), sa.sigma.end());
    std::vector<Complex> gb(sb.sigma.begin(), sb.sigma.end());
    out.rhs = decomposed_distance(out.decomposition, ga, gb);
    return out;
}

}  // namespace svcalc
