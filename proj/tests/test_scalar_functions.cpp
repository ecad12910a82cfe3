#include "svcalc/scalar_functions.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace svcalc;
using namespace std::complex_literals;

namespace {

std::vector<ScalarFunction> named_families() {
    return {ScalarFunction::identity(),          ScalarFunction::scale(2.0i),
            ScalarFunction::scale(-0.5),         ScalarFunction::soft_threshold(1.0),
            ScalarFunction::soft_threshold(0.3), ScalarFunction::clip(2.0),
            ScalarFunction::power(1.0),          tight_function(1.0 - 0.5i),
            tight_function(-1.0),
            ScalarFunction::piecewise_linear({{0, 0}, {1, 1}, {2, 1.0 - 1.0i}, {3.5, 2.0i}})};
}

std::vector<ScalarFunction> real_families() {
    return {ScalarFunction::identity(), ScalarFunction::soft_threshold(1.0), ScalarFunction::clip(1.5),
            ScalarFunction::scale(-2.0), ScalarFunction::piecewise_linear({{0, 0}, {1, 1}, {2, 0.5}, {4, 2}})};
}

}  // namespace

TEST(Evaluate, Examples) {
    EXPECT_EQ(evaluate(ScalarFunction::soft_threshold(2.0), 3.0), Complex(1.0));
    EXPECT_EQ(evaluate(ScalarFunction::identity(), 5.0), Complex(5.0));
    const Complex w = 1.0 - 0.5i;
    const auto f = ScalarFunction::piecewise_linear({{0, 0}, {1, 1}, {1 + std::abs(w - 1.0), w}});
    EXPECT_EQ(evaluate(f, 1.0), Complex(1.0));
    EXPECT_EQ(evaluate(f, 1.5), w);
    EXPECT_EQ(evaluate(f, 7.0), w);  // constant past the last knot
    EXPECT_EQ(evaluate(f, 0.25), Complex(0.25));
}

TEST(Evaluate, FamiliesPointwise) {
    EXPECT_EQ(evaluate(ScalarFunction::hard_threshold(1.0), 0.5), Complex(0.0));
    EXPECT_EQ(evaluate(ScalarFunction::hard_threshold(1.0), 1.5), Complex(1.5));
    EXPECT_EQ(evaluate(ScalarFunction::clip(2.0), 3.0), Complex(2.0));
    EXPECT_EQ(evaluate(ScalarFunction::clip(2.0), 1.0), Complex(1.0));
    EXPECT_DOUBLE_EQ(evaluate(ScalarFunction::power(0.5), 4.0).real(), 2.0);
    EXPECT_EQ(evaluate(ScalarFunction::scale(2.0i), 3.0), Complex(0.0, 6.0));
}

TEST(Evaluate, RejectsNegativeAndNaN) {
    const auto f = ScalarFunction::identity();
    EXPECT_THROW(evaluate(f, -1e-300), std::domain_error);
    EXPECT_THROW(evaluate(f, std::nan("")), std::domain_error);
}

TEST(Evaluate, ZeroMapsToZeroForEveryFamily) {
    auto fs = named_families();
    fs.push_back(ScalarFunction::hard_threshold(1.0));
    fs.push_back(ScalarFunction::power(0.3));
    for (const auto &f : fs)
        EXPECT_EQ(evaluate(f, 0.0), Complex(0.0, 0.0));
}

TEST(Construction, InvalidParameters) {
    EXPECT_THROW(ScalarFunction::soft_threshold(0.0), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::hard_threshold(-1.0), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::clip(std::nan("")), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::power(1.5), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::power(0.0), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::piecewise_linear({}), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::piecewise_linear({{0, 1.0}, {1, 1}}), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::piecewise_linear({{0.5, 0}, {1, 1}}), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::piecewise_linear({{0, 0}, {1, 1}, {1, 2}}), std::invalid_argument);
    EXPECT_THROW(ScalarFunction::piecewise_linear({{0, 0}, {2, 1}, {1, 2}}), std::invalid_argument);
}

TEST(Realness, Detection) {
    EXPECT_TRUE(ScalarFunction::soft_threshold(1).is_real_valued());
    EXPECT_TRUE(ScalarFunction::scale(-3.0).is_real_valued());
    EXPECT_FALSE(ScalarFunction::scale(1.0i).is_real_valued());
    EXPECT_FALSE(tight_function(1.0 - 1.0i).is_real_valued());
    EXPECT_TRUE(tight_function(3.0).is_real_valued());
}

TEST(LipModulus, Examples) {
    EXPECT_EQ(lip_modulus(ScalarFunction::soft_threshold(1.0)).value, 1.0);
    EXPECT_EQ(lip_modulus(ScalarFunction::scale(2.0i)).value, 2.0);
    EXPECT_EQ(lip_modulus(ScalarFunction::piecewise_linear({{0, 0}, {1, 1}, {2, 1.0 - 1.0i}})).value, 1.0);
    EXPECT_EQ(lip_modulus(ScalarFunction::identity()).value, 1.0);
    EXPECT_EQ(lip_modulus(ScalarFunction::clip(3.0)).value, 1.0);
    EXPECT_EQ(lip_modulus(ScalarFunction::identity()).method, ModulusMethod::analytic);
}

TEST(LipModulus, NonLipschitzFlagged) {
    EXPECT_FALSE(lip_modulus(ScalarFunction::hard_threshold(1.0)).finite());
    EXPECT_FALSE(lip_modulus(ScalarFunction::power(0.5)).finite());
    EXPECT_TRUE(lip_modulus(ScalarFunction::power(1.0)).finite());
    EXPECT_THROW(lip_c_modulus(ScalarFunction::hard_threshold(1.0), 10.0), std::domain_error);
}

TEST(LipModulus, SampledAgreesWithAnalytic) {
    for (const auto &f : named_families()) {
        const double cap = default_domain_cap(f);
        const double exact = lip_modulus(f, cap).value;
        const auto sampled = sampled_lip_modulus(f, cap);
        EXPECT_EQ(sampled.method, ModulusMethod::sampled);
        EXPECT_LE(sampled.value, exact * (1 + 1e-12));
        EXPECT_GE(sampled.value, exact * (1 - 1e-9));
    }
}

TEST(LipModulus, BoundsGrowthFromOrigin) {
    // f(0) = 0 and Lipschitz imply |f(x)| <= lip x.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (const auto &f : named_families()) {
        const double lip = lip_modulus(f).value;
        for (int k = 0; k < 1000; ++k) {
            const double x = u(rng);
            EXPECT_LE(std::abs(f(x)), lip * x * (1 + 1e-12) + 1e-15);
        }
    }
}

TEST(LipCModulus, IdentityIsOne) {
    EXPECT_NEAR(lip_c_modulus(ScalarFunction::identity(), 10.0), 1.0, 1e-12);
}

TEST(LipCModulus, RealValuedEqualsLip) {
    for (const auto &f : real_families()) {
        const double cap = default_domain_cap(f);
        const double lip = lip_modulus(f, cap).value;
        EXPECT_NEAR(lip_c_modulus(f, cap), lip, 1e-6);
    }
}

TEST(LipCModulus, WithinProvenBounds) {
    for (const auto &f : named_families()) {
        const double cap = default_domain_cap(f);
        const double lip = lip_modulus(f, cap).value;
        const double lc = lip_c_modulus(f, cap, 32);
        EXPECT_GE(lc, lip - 1e-12);
        EXPECT_LE(lc, kSqrt2 * lip + 1e-12);
    }
}

TEST(LipCModulus, TightFunctionNearSqrt2) {
    const Complex w = 1.0 - 0.001i;
    const auto f = tight_function(w);
    // Oracle: the extremal triple x = 1 + |w-1|, y = 1, c = e^{0.001 i}.
    const double x = 1.0 + std::abs(w - 1.0), y = 1.0;
    const Complex c = std::polar(1.0, 0.001);
    const double oracle = std::abs(f(x) - c * f(y)) / std::abs(x - c * y);
    EXPECT_GE(oracle, kSqrt2 - 1e-2);
    const double lc = lip_c_modulus(f, default_domain_cap(f));
    EXPECT_GE(lc, oracle - 1e-12);
    EXPECT_GE(lc, kSqrt2 - 1e-2);
    EXPECT_LE(lc, kSqrt2 * lip_modulus(f).value + 1e-12);
}

TEST(LipschitzModuli, Struct) {
    const auto m = lipschitz_moduli(tight_function(1.0 - 1.0i), 10.0, 16);
    EXPECT_NEAR(m.lip.value, 1.0, 1e-12);
    EXPECT_EQ(m.lip_c.method, ModulusMethod::sampled);
    EXPECT_LE(m.lip.value, m.lip_c.value + 1e-12);
    EXPECT_LE(m.lip_c.value, m.lip_c_upper + 1e-12);
    const auto h = lipschitz_moduli(ScalarFunction::hard_threshold(1.0), 10.0);
    EXPECT_FALSE(h.lip.finite());
    EXPECT_FALSE(h.lip_c.finite());
}

TEST(BestPhase, FindsNarrowPeak) {
    // Oracle: dense angle scan around the known peak of the tight pair.
    const Complex w = 1.0 - 0.001i;
    const double x = 1.001, y = 1.0;
    double dense = 0.0;
    for (int k = -20000; k <= 20000; ++k) {
        const double th = 0.01 * k / 20000.0;
        const Complex c = std::polar(1.0, th);
        const double den = std::abs(x - c * y);
        if (den > 0)
            dense = std::max(dense, std::abs(w - c) / den);
    }
    const auto best = best_phase(x, y, w, 1.0);
    EXPECT_GE(best.ratio, dense - 1e-9);
}

TEST(TightFunction, Knots) {
    const auto check = [](Complex w, double x2) {
        const auto f = tight_function(w);
        const auto &pl = std::get<fn::PiecewiseLinear>(f.kind());
        ASSERT_EQ(pl.knots.size(), 3u);
        EXPECT_EQ(pl.knots[0].x, 0.0);
        EXPECT_EQ(pl.knots[1].x, 1.0);
        EXPECT_EQ(pl.knots[1].value, Complex(1.0));
        EXPECT_DOUBLE_EQ(pl.knots[2].x, x2);
        EXPECT_EQ(pl.knots[2].value, w);
        EXPECT_EQ(f(1.0), Complex(1.0));
        EXPECT_EQ(f(1.0 + std::abs(w - 1.0)), w);
    };
    check(-1.0, 3.0);
    check(1.0 - 1.0i, 2.0);
    EXPECT_THROW(tight_function(1.0), std::invalid_argument);
}

TEST(TightFunction, UnitLipschitzForRandomW) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const Complex w(n(rng), n(rng));
        EXPECT_NEAR(lip_modulus(tight_function(w)).value, 1.0, 1e-12);
    }
}

TEST(ExtremalRatio, ApproachesSqrt2) {
    // Reference values from 40-digit evaluation.
    EXPECT_NEAR(extremal_ratio(1e-3), 1.4138600973413955, 1e-15);
    EXPECT_NEAR(extremal_ratio(1e-6), 1.4142132088197928, 1e-15);
    EXPECT_NEAR(extremal_ratio(1.0), 1.1264852206920373, 1e-15);
    EXPECT_NEAR(extremal_ratio(1e-3), kSqrt2, 1e-3);
    EXPECT_NEAR(extremal_ratio(1e-6), kSqrt2, 1e-6);
    EXPECT_LT(extremal_ratio(1.0), kSqrt2);
    EXPECT_THROW(extremal_ratio(0.0), std::invalid_argument);
}

TEST(ExtremalRatio, MatchesMaxnormFormula) {
    for (double t : {1e-1, 1e-2, 1e-3, -1e-3, 0.5, -0.7}) {
        const Complex w(1.0, -t);
        const Complex c = std::polar(1.0, t);
        EXPECT_NEAR(extremal_ratio(t), maxnorm_ratio(w, c), 1e-12);
    }
    EXPECT_NEAR(extremal_ratio(-1e-3), extremal_ratio(1e-3), 1e-15);
}

TEST(ExtremalRatio, MonotoneAsTShrinks) {
    double prev = 0.0;
    for (double t = 1.0; t > 1e-7; t /= 3.0) {
        const double r = extremal_ratio(t);
        EXPECT_GT(r, prev);
        EXPECT_LT(r, kSqrt2);
        prev = r;
    }
}

TEST(Maxnorm, Examples) {
    EXPECT_DOUBLE_EQ(maxnorm_ratio(2.0, 1.0), 1.0);
    EXPECT_NEAR(maxnorm_ratio(1.0 - 0.001i, std::polar(1.0, 0.001)), kSqrt2, 2e-3);
    EXPECT_THROW(maxnorm_ratio(1.0, 1.0), std::domain_error);
    EXPECT_THROW(maxnorm_ratio(2.0, 2.0), std::invalid_argument);
}

TEST(Maxnorm, ExpandedFormIdentity) {
    // 2|1+|w-1|-c|^2 - |w-c|^2 equals the expanded polynomial form.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3.0, 3.0), a(-std::numbers::pi, std::numbers::pi);
    for (int k = 0; k < 10000; ++k) {
        const Complex w(u(rng), u(rng));
        const Complex c = std::polar(1.0, a(rng));
        const double direct = 2.0 * std::norm(1.0 + std::abs(w - 1.0) - c) - std::norm(w - c);
        EXPECT_NEAR(maxnorm_expanded(w, c), direct, 1e-11 * (1.0 + std::abs(direct)));
        EXPECT_GE(maxnorm_expanded(w, c), maxnorm_worst_case(w) - 1e-12);
        // (|w-2| - 1)^2 lower-bounds the worst case
        const double sq = std::abs(w - 2.0) - 1.0;
        EXPECT_GE(maxnorm_worst_case(w), sq * sq - 1e-11);
    }
}

TEST(Maxnorm, RandomScanNeverExceedsSqrt2) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-3.0, 3.0), a(-std::numbers::pi, std::numbers::pi);
    double worst = 0.0;
    for (int k = 0; k < 1000000; ++k) {
        const Complex w(u(rng), u(rng));
        const Complex c = std::polar(1.0, a(rng));
        if (std::abs(1.0 + std::abs(w - 1.0) - c) <= 1e-15)
            continue;
        worst = std::max(worst, maxnorm_ratio(w, c));
    }
    EXPECT_LE(worst, kSqrt2 + 1e-12);
}

TEST(RealCase, AlgebraicIdentity) {
    // |f(x) - c f(y)|^2 = |f(x) - f(y)|^2 + 2 (1 - Re c) f(x) f(y) for real f.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 5.0), a(-std::numbers::pi, std::numbers::pi);
    for (const auto &f : real_families())
        for (int k = 0; k < 2000; ++k) {
            const double x = u(rng), y = u(rng);
            const Complex c = std::polar(1.0, a(rng));
            const double fx = f(x).real(), fy = f(y).real();
            const double lhs = std::norm(fx - c * fy);
            const double rhs = (fx - fy) * (fx - fy) + 2.0 * (1.0 - c.real()) * fx * fy;
            EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + lhs));
        }
}

TEST(Monotonicity, DistanceRatioNondecreasingInX) {
    // x -> (x - y) / |x - c y| is nondecreasing for x >= y.
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(0.01, 5.0), a(-std::numbers::pi, std::numbers::pi);
    for (int k = 0; k < 200; ++k) {
        const double y = u(rng);
        const Complex c = std::polar(1.0, a(rng));
        double prev = -1.0;
        for (int s = 1; s <= 200; ++s) {
            const double x = y + 0.05 * s;
            const double v = (x - y) / std::abs(x - c * y);
            EXPECT_GE(v, prev - 1e-14);
            prev = v;
        }
    }
}
