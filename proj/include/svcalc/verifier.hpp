#pragma once

// Randomized and structured checks of ||f_s(A) - f_s(B)||_F <= K ||A - B||_F
// with K = ||f||_Lip for real-valued f and K = sqrt(2) ||f||_Lip otherwise.

#include "svcalc/cdss.hpp"
#include "svcalc/core_matrix.hpp"
#include "svcalc/scalar_functions.hpp"
#include "svcalc/svfc.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace svcalc {

/// ||f_s(A) - f_s(B)||_F / ||A - B||_F. Throws if A and B coincide.
template <SingularValueMap F>
double operator_ratio(const F &f, const ComplexMatrix &A, const ComplexMatrix &B,
                      const Tolerances &tol = {}) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("operator_ratio: shape mismatch");
    const double dist = (A - B).norm();
    const double scale = std::max({1e-300, A.norm(), B.norm()});
    if (!(dist > 1e-14 * scale))
        throw std::invalid_argument("operator_ratio: A and B coincide; ratio undefined");
    return (apply_svfc(f, A, tol) - apply_svfc(f, B, tol)).norm() / dist;
}

enum class BoundKind { lip_real, sqrt2_lip_complex, lip_c, not_applicable };

inline const char *to_string(BoundKind k) {
    switch (k) {
    case BoundKind::lip_real: return "lip_real";
    case BoundKind::sqrt2_lip_complex: return "sqrt2_lip_complex";
    case BoundKind::lip_c: return "lip_c";
    case BoundKind::not_applicable: return "not_applicable";
    }
    return "?";
}

/// How a trial pair (A, B) is drawn.
enum class TrialKind {
    gaussian,        ///< independent complex Gaussian A, B
    shared_vectors,  ///< A = U S1 V*, B = U S2 V*, S2 differing from S1 on a subset
    perturbation,    ///< B = A + eps E
    phase_probe,     ///< A = U diag(x, r) V*, B = U diag(c y, r) V*, c maximising the scalar ratio
};

inline const char *to_string(TrialKind k) {
    switch (k) {
    case TrialKind::gaussian: return "gaussian";
    case TrialKind::shared_vectors: return "shared_vectors";
    case TrialKind::perturbation: return "perturbation";
    case TrialKind::phase_probe: return "phase_probe";
    }
    return "?";
}

struct TrialConfig {
    Index dimension = 4;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    ScalarFunction function = ScalarFunction::identity();
    double matrix_scale = 1.0;
    double perturbation_scale = 1e-3;
    double tol_bound = 1e-9;
    /// Compare against the sampled complex modulus instead of the proven bound.
    bool use_lip_c = false;
    /// 0 picks the hardware concurrency, capped by SVCALC_THREADS.
    unsigned threads = 0;

    void validate() const {
        if (dimension < 1)
            throw std::invalid_argument("TrialConfig: dimension must be >= 1");
        if (trials < 1)
            throw std::invalid_argument("TrialConfig: trials must be >= 1");
        if (!(matrix_scale > 0) || !(perturbation_scale > 0) || !(tol_bound > 0))
            throw std::invalid_argument("TrialConfig: scales and tolerance must be > 0");
    }
};

struct TrialRecord {
    std::size_t index = 0;
    TrialKind kind = TrialKind::gaussian;
    double ratio = 0.0;
};

struct VerificationReport {
    TrialConfig config;
    std::vector<TrialRecord> records;
    double max_ratio = 0.0;
    double bound_used = kInfinity;
    BoundKind bound_kind = BoundKind::not_applicable;
    bool applicable = false;
    bool pass = false;
    double runtime_sec = 0.0;

    double max_ratio_of(TrialKind k) const {
        double m = 0.0;
        for (const auto &r : records)
            if (r.kind == k)
                m = std::max(m, r.ratio);
        return m;
    }
};

inline unsigned worker_count(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("SVCALC_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

namespace detail {

/// Abscissae worth probing for f: its breakpoints, points just past them,
/// and a spread up to twice the characteristic scale.
inline std::vector<double> probe_points(const ScalarFunction &f) {
    const double s = f.characteristic_scale();
    std::vector<double> xs{0.25 * s, 0.5 * s, s, 1.5 * s, 2.0 * s};
    for (double b : f.breakpoints()) {
        xs.push_back(b);
        xs.push_back(b * (1.0 + 1e-3));
        xs.push_back(b * (1.0 - 1e-3));
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

inline ComplexMatrix svd_embed(const ComplexMatrix &U, const ComplexVector &diag, const ComplexMatrix &V) {
    return U * diag.asDiagonal() * V.adjoint();
}

inline TrialRecord run_trial(const TrialConfig &cfg, const std::vector<double> &probes, std::size_t i) {
    const Index d = cfg.dimension;
    const ScalarFunction &f = cfg.function;
    Rng rng = trial_rng(cfg.seed, i, static_cast<std::uint64_t>(d));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double radius = 2.0 * cfg.matrix_scale * f.characteristic_scale();

    TrialRecord rec;
    rec.index = i;
    rec.kind = static_cast<TrialKind>(i % 4);

    ComplexMatrix A, B;
    switch (rec.kind) {
    case TrialKind::gaussian: {
        const double sa = radius * (0.05 + unit(rng)) / std::sqrt(static_cast<double>(d));
        const double sb = radius * (0.05 + unit(rng)) / std::sqrt(static_cast<double>(d));
        A = random_gaussian(d, d, rng, sa);
        B = random_gaussian(d, d, rng, sb);
        break;
    }
    case TrialKind::shared_vectors: {
        const ComplexMatrix U = random_unitary(d, rng);
        const ComplexMatrix V = random_unitary(d, rng);
        ComplexVector s1(d), s2(d);
        std::normal_distribution<double> normal(0.0, cfg.perturbation_scale * radius);
        // perturb a random nonempty subset
        const Index k = 1 + static_cast<Index>(unit(rng) * static_cast<double>(d)) % d;
        for (Index j = 0; j < d; ++j) {
            s1(j) = radius * unit(rng);
            s2(j) = s1(j);
        }
        for (Index j = 0; j < k; ++j) {
            const double moved = s1(j).real() + normal(rng);
            s2(j) = std::abs(moved);
        }
        if (s1 == s2)
            s2(0) += cfg.perturbation_scale * radius;
        A = svd_embed(U, s1, V);
        B = svd_embed(U, s2, V);
        break;
    }
    case TrialKind::perturbation: {
        A = random_gaussian(d, d, rng, radius * (0.05 + unit(rng)) / std::sqrt(static_cast<double>(d)));
        const ComplexMatrix E = random_gaussian(d, d, rng);
        B = A + (cfg.perturbation_scale * A.norm() / E.norm()) * E;
        break;
    }
    case TrialKind::phase_probe: {
        const std::size_t np = probes.size();
        const std::size_t pair = (i / 4) % (np * np);
        const double x = probes[pair / np];
        const double y = probes[pair % np];
        const auto best = best_phase(x, y, f(x), f(y));
        const ComplexMatrix U = random_unitary(d, rng);
        const ComplexMatrix V = random_unitary(d, rng);
        ComplexVector sa(d), sb(d);
        sa(0) = x;
        sb(0) = std::polar(y, best.theta);
        for (Index j = 1; j < d; ++j) {
            sa(j) = radius * unit(rng);
            sb(j) = sa(j);
        }
        A = svd_embed(U, sa, V);
        B = svd_embed(U, sb, V);
        break;
    }
    }
    rec.ratio = operator_ratio(f, A, B);
    return rec;
}

}  // namespace detail

/// Runs cfg.trials trial pairs, cycling through the four TrialKinds, and
/// checks the largest ratio against the bound implied by f. Trial i depends
/// only on (seed, dimension, i), so results are independent of threading.
inline VerificationReport verify_bound(const TrialConfig &cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.config = cfg;

    const Modulus lip = lip_modulus(cfg.function);
    rep.applicable = lip.finite();
    if (rep.applicable) {
        if (cfg.use_lip_c) {
            rep.bound_kind = BoundKind::lip_c;
            rep.bound_used = lip_c_modulus(cfg.function, default_domain_cap(cfg.function));
        } else if (cfg.function.is_real_valued()) {
            rep.bound_kind = BoundKind::lip_real;
            rep.bound_used = lip.value;
        } else {
            rep.bound_kind = BoundKind::sqrt2_lip_complex;
            rep.bound_used = kSqrt2 * lip.value;
        }
    }

    const auto probes = detail::probe_points(cfg.function);
    rep.records.resize(cfg.trials);
    const unsigned workers = std::min<std::size_t>(worker_count(cfg.threads), cfg.trials);
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < cfg.trials; i += workers)
            rep.records[i] = detail::run_trial(cfg, probes, i);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    work(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto &t : pool)
            t.join();
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    for (const auto &r : rep.records)
        rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    rep.pass = rep.applicable && rep.max_ratio <= rep.bound_used * (1.0 + cfg.tol_bound);
    rep.runtime_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// Ratio of the 1x1 pair A = [1 + |w-1|], B = [e^{it}] under f = tight_function(w),
/// w = 1 - it, computed through the matrix calculus.
inline double scalar_tightness(double t) {
    if (!(t != 0.0) || !std::isfinite(t))
        throw std::invalid_argument("scalar_tightness: t must be finite and nonzero");
    const Complex w(1.0, -t);
    const ScalarFunction f = tight_function(w);
    ComplexMatrix A(1, 1), B(1, 1);
    A(0, 0) = 1.0 + std::abs(w - 1.0);
    B(0, 0) = std::polar(1.0, t);
    return operator_ratio(f, A, B);
}

inline std::vector<VerificationReport> dimension_sweep(const ScalarFunction &f, const std::vector<Index> &dims,
                                                       std::size_t trials_per_dim, std::uint64_t seed,
                                                       TrialConfig base = {}) {
    std::vector<VerificationReport> out;
    for (Index d : dims) {
        base.dimension = d;
        base.trials = trials_per_dim;
        base.seed = seed;
        base.function = f;
        out.push_back(verify_bound(base));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scan of |w - c| / |1 + |w-1| - c| over a box of w and the unit circle.

struct MaxnormScanConfig {
    double half_width = 3.0;       ///< w ranges over [-h, h] x [-h, h]
    int grid = 250;                ///< grid x grid values of w
    int angles = 16;               ///< values of c per w
    int refine_starts = 8;         ///< best grid samples used as refinement seeds
    int refine_iterations = 400;
    double min_gap = 1e-5;         ///< refinement keeps |w - 1| and |arg c| above this
};

struct MaxnormScanResult {
    std::size_t samples = 0;
    double max_ratio = 0.0;
    Complex argmax_w;
    Complex argmax_c;
    double grid_max_ratio = 0.0;
    double min_worst_case = kInfinity;  ///< min over samples of maxnorm_worst_case(w)
    double min_expanded = kInfinity;    ///< min over samples of maxnorm_expanded(w, c)
};

/// Grid over (w, c), then compass search from the best grid points in
/// (Re w, Im w, arg c).
inline MaxnormScanResult scan_maxnorm(const MaxnormScanConfig &cfg = {}) {
    MaxnormScanResult res;
    struct Sample {
        double ratio, re, im, th;
    };
    std::vector<Sample> top;
    auto consider = [&](double re, double im, double th) -> double {
        const Complex w(re, im);
        const Complex c = std::polar(1.0, th);
        const double den = std::abs(1.0 + std::abs(w - 1.0) - c);
        ++res.samples;
        res.min_worst_case = std::min(res.min_worst_case, maxnorm_worst_case(w));
        res.min_expanded = std::min(res.min_expanded, maxnorm_expanded(w, c));
        if (!(den > 1e-15))
            return -1.0;
        const double r = std::abs(w - c) / den;
        if (r > res.max_ratio) {
            res.max_ratio = r;
            res.argmax_w = w;
            res.argmax_c = c;
        }
        return r;
    };

    const double h = cfg.half_width;
    for (int a = 0; a < cfg.grid; ++a)
        for (int b = 0; b < cfg.grid; ++b) {
            const double re = -h + 2.0 * h * (a + 0.5) / cfg.grid;
            const double im = -h + 2.0 * h * (b + 0.5) / cfg.grid;
            for (int k = 0; k < cfg.angles; ++k) {
                const double th = -std::numbers::pi + 2.0 * std::numbers::pi * (k + 0.5) / cfg.angles;
                const double r = consider(re, im, th);
                if (static_cast<int>(top.size()) < cfg.refine_starts || r > top.back().ratio) {
                    top.push_back({r, re, im, th});
                    std::sort(top.begin(), top.end(), [](auto &x, auto &y) { return x.ratio > y.ratio; });
                    if (static_cast<int>(top.size()) > cfg.refine_starts)
                        top.pop_back();
                }
            }
        }
    res.grid_max_ratio = res.max_ratio;

    auto admissible = [&](double re, double im, double th) {
        return std::abs(Complex(re, im) - 1.0) >= cfg.min_gap && std::abs(th) >= cfg.min_gap;
    };
    for (const auto &s : top) {
        double p[3] = {s.re, s.im, s.th};
        double cur = s.ratio;
        double step = 2.0 * h / cfg.grid;
        for (int it = 0; it < cfg.refine_iterations && step > 1e-3 * cfg.min_gap; ++it) {
            bool improved = false;
            for (int axis = 0; axis < 3; ++axis)
                for (double dir : {-1.0, 1.0}) {
                    double q[3] = {p[0], p[1], p[2]};
                    q[axis] += dir * step;
                    if (!admissible(q[0], q[1], q[2]))
                        continue;
                    const double r = consider(q[0], q[1], q[2]);
                    if (r > cur) {
                        cur = r;
                        std::copy(q, q + 3, p);
                        improved = true;
                    }
                }
            if (!improved)
                step *= 0.5;
            else
                step *= 1.5;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Lipschitz transfer through the distance identity

struct TransferCheck {
    double fs_lhs = 0.0;   ///< ||f_s(A) - f_s(B)||_F^2
    double fs_rhs = 0.0;   ///< the same through the decomposition of the alignment matrix
    double dist_lhs = 0.0; ///< ||A - B||_F^2
    /// max over terms/rows of |f(x) - g f(y)|^2 / |x - g y|^2 (nondegenerate rows only)
    double max_term_ratio_sq = 0.0;
};

inline TransferCheck lipschitz_transfer(const ScalarFunction &f, const ComplexMatrix &A,
                                        const ComplexMatrix &B, const Tolerances &tol = {}) {
    const auto base = distance_identity_check(A, B, tol);
    TransferCheck out;
    out.dist_lhs = base.lhs;
    out.fs_lhs = (apply_svfc(f, A, tol) - apply_svfc(f, B, tol)).squaredNorm();

    auto transformed = [&](const RealVector &s) {
        std::vector<Complex> g(s.size());
        const double cutoff = s.size() ? tol.rank * s(0) : 0.0;
        for (Index i = 0; i < s.size(); ++i)
            g[i] = s(i) >= cutoff && s(i) > 0 ? f(s(i)) : Complex(0.0);
        return g;
    };
    const auto fa = transformed(base.sigma_a);
    const auto fb = transformed(base.sigma_b);
    out.fs_rhs = decomposed_distance(base.decomposition, fa, fb);

    for (const auto &t : base.decomposition.terms)
        for (Index i = 0; i < base.decomposition.dimension; ++i) {
            const Complex g = t.pp.phases[i];
            const Index k = t.pp.perm[i];
            const double den = std::norm(base.sigma_b(i) - g * base.sigma_a(k));
            if (den < 1e-20)
                continue;
            out.max_term_ratio_sq = std::max(out.max_term_ratio_sq, std::norm(fb[i] - g * fa[k]) / den);
        }
    return out;
}

}  // namespace svcalc
