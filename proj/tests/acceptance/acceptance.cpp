// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "svcalc/svcalc.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace svcalc;
using namespace std::complex_literals;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ComplexMatrix random_normal(Index d, Rng &rng) {
    const ComplexMatrix Q = random_unitary(d, rng);
    const ComplexVector lam = random_gaussian(d, 1, rng, 2.0);
    return Q * lam.asDiagonal() * Q.adjoint();
}

ScalarFunction random_complex_pwl(Rng &rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<fn::Knot> knots{{0.0, 0.0}};
    const int n = 2 + static_cast<int>(unit(rng) * 5);
    double x = 0.0;
    for (int k = 0; k < n; ++k) {
        x += 0.1 + 1.5 * unit(rng);
        knots.push_back({x, Complex(4.0 * unit(rng) - 2.0, 4.0 * unit(rng) - 2.0)});
    }
    return ScalarFunction::piecewise_linear(std::move(knots));
}

Outcome ac1() {
    const auto t0 = Clock::now();
    TrialConfig cfg;
    cfg.function = ScalarFunction::soft_threshold(1.0);
    cfg.dimension = 8;
    cfg.trials = 10000;
    cfg.tol_bound = 1e-9;
    const auto rep = verify_bound(cfg);
    ComplexVector a = ComplexVector::Constant(8, 0.5), b = ComplexVector::Constant(8, 0.5);
    a(0) = 3.0;
    b(0) = 2.5;
    const ComplexMatrix A = a.asDiagonal(), B = b.asDiagonal();
    const double structured = operator_ratio(cfg.function, A, B);
    const double secs = seconds_since(t0);
    const bool ok = rep.pass && rep.bound_kind == BoundKind::lip_real && rep.bound_used == 1.0 &&
                    structured >= 0.999 && secs < 60.0;
    return {ok, fmt("max_ratio=%.12g bound=%g structured=%.12g time=%.2fs", rep.max_ratio, rep.bound_used,
                    structured, secs)};
}

Outcome ac2() {
    const auto t0 = Clock::now();
    const double r3 = scalar_tightness(1e-3);
    const double r6 = scalar_tightness(1e-6);
    const double secs = seconds_since(t0);
    const bool ok = std::abs(r3 - kSqrt2) <= 1e-3 && std::abs(r6 - kSqrt2) <= 1e-6 && secs < 1.0;
    return {ok, fmt("t=1e-3: %.12g  t=1e-6: %.12g  time=%.4fs", r3, r6, secs)};
}

Outcome ac3() {
    Rng rng(2024);
    double worst = 0.0;  // largest ratio / (sqrt2 lip)
    std::size_t violations = 0;
    for (int k = 0; k < 20; ++k) {
        const ScalarFunction f = random_complex_pwl(rng);
        const double bound = kSqrt2 * lip_modulus(f).value;
        for (Index d : {2, 4, 8}) {
            TrialConfig cfg;
            cfg.function = f;
            cfg.dimension = d;
            cfg.trials = 1000;
            cfg.seed = 100 + static_cast<std::uint64_t>(k);
            const auto rep = verify_bound(cfg);
            for (const auto &r : rep.records) {
                worst = std::max(worst, r.ratio / bound);
                if (r.ratio > bound * (1.0 + 1e-9))
                    ++violations;
            }
        }
    }
    return {violations == 0, fmt("60000 pairs, max ratio/(sqrt2 lip)=%.12g violations=%zu", worst, violations)};
}

Outcome ac4() {
    const auto t0 = Clock::now();
    std::size_t failures = 0;
    double worst_recon = 0.0, worst_sum = 0.0;
    std::size_t max_terms = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Index d = 2 + static_cast<Index>(s % 15);
        Rng rng = trial_rng(4040, s);
        const auto sa = svd(random_gaussian(d, d, rng));
        const auto sb = svd(random_gaussian(d, d, rng));
        const ComplexMatrix W = alignment_matrix(sa, sb);
        bool ok = is_cdss(W, 1e-12);
        const auto dec = decompose(W, 1e-12);
        for (const auto &t : dec.terms)
            ok = ok && t.weight >= 0.0;
        const double sum_err = std::abs(dec.weight_sum() - 1.0);
        const double recon = (dec.reconstruct() - W).norm();
        ok = ok && sum_err <= 1e-12 && recon <= 1e-10 && dec.terms.size() <= max_decomposition_terms(d);
        worst_recon = std::max(worst_recon, recon);
        worst_sum = std::max(worst_sum, sum_err);
        max_terms = std::max(max_terms, dec.terms.size());
        failures += !ok;
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < 30.0,
            fmt("failures=%zu max_recon=%.3g max_|sum-1|=%.3g max_terms=%zu (bound at d=16: %zu) time=%.2fs",
                failures, worst_recon, worst_sum, max_terms, max_decomposition_terms(16), secs)};
}

Outcome ac5() {
    std::size_t failures = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const Index d = 1 + static_cast<Index>(s % 8);
        Rng rng = trial_rng(5050, s);
        std::uniform_real_distribution<double> scale(0.1, 3.0);
        const ComplexMatrix A = random_gaussian(d, d, rng, scale(rng));
        const ComplexMatrix B = random_gaussian(d, d, rng, scale(rng));
        const auto r = distance_identity_check(A, B);
        worst = std::max(worst, std::abs(r.lhs - r.rhs) / (1.0 + r.lhs));
        failures += !r.holds(1e-8);
    }
    return {failures == 0, fmt("failures=%zu max |lhs-rhs|/(1+lhs)=%.3g", failures, worst)};
}

Outcome ac6() {
    const auto res = scan_maxnorm();
    const bool ok = res.samples >= 1000000 && res.max_ratio <= kSqrt2 + 1e-12 && res.max_ratio >= kSqrt2 - 1e-3 &&
                    res.min_worst_case >= 0.0 && res.min_expanded >= 0.0;
    return {ok, fmt("samples=%zu max=%.15g (grid %.15g) at w=%.6g%+.6gi min_worst=%.3g min_expanded=%.3g",
                    res.samples, res.max_ratio, res.grid_max_ratio, res.argmax_w.real(), res.argmax_w.imag(),
                    res.min_worst_case, res.min_expanded)};
}

Outcome ac7() {
    ComplexMatrix S(2, 2);
    S << 0, 1, 1, 0;
    const auto cmp = compare_normal(PlaneFunction::monomial(2), S);
    bool ok = (cmp.fs_result - S).norm() <= 1e-12 && (cmp.cfc_result - ComplexMatrix::Identity(2, 2)).norm() <= 1e-12 &&
              !cmp.results_equal;
    Rng rng(7070);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const ComplexMatrix N = random_normal(1 + k % 8, rng);
        const Complex alpha(u(rng), u(rng));
        const auto c = compare_normal(PlaneFunction::linear(alpha), N);
        worst = std::max(worst, c.max_difference);
        ok = ok && c.max_difference <= 1e-10;
    }
    return {ok, fmt("swap: fs=swap cfc=I differ=%d; linear max difference=%.3g", !cmp.results_equal, worst)};
}

Outcome ac8() {
    const std::vector<ScalarFunction> fams{
        ScalarFunction::soft_threshold(1.0), ScalarFunction::clip(1.5), ScalarFunction::scale(-2.0),
        ScalarFunction::power(0.5), ScalarFunction::piecewise_linear({{0, 0}, {1, 2}, {2, -1}, {3, 0.5}})};
    Rng rng(8080);
    std::uniform_real_distribution<double> u(0.0, 5.0), a(-std::numbers::pi, std::numbers::pi);
    double worst = 0.0;
    std::size_t samples = 0;
    for (const auto &f : fams)
        for (int k = 0; k < 100000; ++k, ++samples) {
            const double x = u(rng), y = u(rng);
            const Complex c = std::polar(1.0, a(rng));
            const double fx = f(x).real(), fy = f(y).real();
            const double lhs = std::norm(fx - c * fy);
            const double rhs = (fx - fy) * (fx - fy) + 2.0 * (1.0 - c.real()) * fx * fy;
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + lhs));
        }
    return {worst <= 1e-12, fmt("samples=%zu max relative error=%.3g", samples, worst)};
}

Outcome ac9() {
    const ScalarFunction f = tight_function(1.0 - 1e-3i);
    const auto reps = dimension_sweep(f, {1, 2, 4, 8}, 2000, 9090);
    bool ok = true;
    const double d1 = reps.front().max_ratio;
    std::string maxima;
    for (const auto &r : reps) {
        ok = ok && r.pass && r.bound_used == reps.front().bound_used;
        if (r.config.dimension > 1)
            ok = ok && r.max_ratio <= d1 * (1.0 + 1e-9);
        maxima += fmt(" d=%d:%.12g", static_cast<int>(r.config.dimension), r.max_ratio);
    }
    ok = ok && d1 >= kSqrt2 - 1e-2;
    return {ok, fmt("bound=%.12g", reps.front().bound_used) + maxima};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"AC1 real sharp constant", ac1},
        {"AC2 complex sharp constant sqrt2", ac2},
        {"AC3 upper bound never violated", ac3},
        {"AC4 cdss decomposition", ac4},
        {"AC5 Frobenius distance identity", ac5},
        {"AC6 maxnorm claim", ac6},
        {"AC7 normal-operator comparison", ac7},
        {"AC8 real-case scalar identity", ac8},
        {"AC9 dimension independence", ac9}};
    int failed = 0;
    for (const auto &[name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
