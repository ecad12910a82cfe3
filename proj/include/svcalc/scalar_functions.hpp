#pragma once

#include "svcalc/core_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace svcalc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kSqrt2 = std::numbers::sqrt2;

namespace fn {

struct Identity {};
struct Scale {
    Complex alpha;
};
struct SoftThreshold {
    double tau;
};
struct HardThreshold {
    double tau;
};
struct Clip {
    double c;
};
struct Power {
    double p;
};
struct Knot {
    double x;
    Complex value;
};
/// Linear interpolation between knots, constant past the last knot.
struct PiecewiseLinear {
    std::vector<Knot> knots;
};

}  // namespace fn

/// A function f: [0, inf) -> C with f(0) = 0, from a closed set of families.
class ScalarFunction {
  public:
    using Kind = std::variant<fn::Identity, fn::Scale, fn::SoftThreshold, fn::HardThreshold,
                              fn::Clip, fn::Power, fn::PiecewiseLinear>;

    static ScalarFunction identity() { return ScalarFunction(fn::Identity{}); }

    static ScalarFunction scale(Complex alpha) {
        if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
            throw std::invalid_argument("scale: alpha must be finite");
        return ScalarFunction(fn::Scale{alpha});
    }

    static ScalarFunction soft_threshold(double tau) {
        require_positive(tau, "soft_threshold: tau");
        return ScalarFunction(fn::SoftThreshold{tau});
    }

    static ScalarFunction hard_threshold(double tau) {
        require_positive(tau, "hard_threshold: tau");
        return ScalarFunction(fn::HardThreshold{tau});
    }

    static ScalarFunction clip(double c) {
        require_positive(c, "clip: c");
        return ScalarFunction(fn::Clip{c});
    }

    static ScalarFunction power(double p) {
        if (!(p > 0.0 && p <= 1.0))
            throw std::invalid_argument("power: exponent must lie in (0, 1]");
        return ScalarFunction(fn::Power{p});
    }

    static ScalarFunction piecewise_linear(std::vector<fn::Knot> knots) {
        if (knots.empty())
            throw std::invalid_argument("piecewise_linear: at least one knot required");
        if (knots.front().x != 0.0 || knots.front().value != Complex(0.0, 0.0))
            throw std::invalid_argument("piecewise_linear: first knot must be (0, 0)");
        for (std::size_t k = 0; k < knots.size(); ++k) {
            const auto &kn = knots[k];
            if (!std::isfinite(kn.x) || !std::isfinite(kn.value.real()) ||
                !std::isfinite(kn.value.imag()))
                throw std::invalid_argument("piecewise_linear: knots must be finite");
            if (k > 0 && !(kn.x > knots[k - 1].x))
                throw std::invalid_argument(
                    "piecewise_linear: knot abscissae must be strictly increasing");
        }
        return ScalarFunction(fn::PiecewiseLinear{std::move(knots)});
    }

    const Kind &kind() const { return kind_; }

    template <class T> bool is() const { return std::holds_alternative<T>(kind_); }

    Complex operator()(double x) const {
        if (!(x >= 0.0))
            throw std::domain_error("ScalarFunction: argument must be a nonnegative number");
        if (x == 0.0)
            return {0.0, 0.0};
        return std::visit([x](const auto &k) { return eval(k, x); }, kind_);
    }

    bool is_real_valued() const {
        return std::visit(
            [](const auto &k) -> bool {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, fn::Scale>)
                    return k.alpha.imag() == 0.0;
                else if constexpr (std::is_same_v<T, fn::PiecewiseLinear>)
                    return std::all_of(k.knots.begin(), k.knots.end(),
                                       [](const fn::Knot &kn) { return kn.value.imag() == 0.0; });
                else
                    return true;
            },
            kind_);
    }

    /// Abscissae where the function changes behaviour (thresholds, knots).
    std::vector<double> breakpoints() const {
        return std::visit(
            [](const auto &k) -> std::vector<double> {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, fn::SoftThreshold> ||
                              std::is_same_v<T, fn::HardThreshold>)
                    return {k.tau};
                else if constexpr (std::is_same_v<T, fn::Clip>)
                    return {k.c};
                else if constexpr (std::is_same_v<T, fn::PiecewiseLinear>) {
                    std::vector<double> xs;
                    for (const auto &kn : k.knots)
                        if (kn.x > 0)
                            xs.push_back(kn.x);
                    return xs;
                } else
                    return {};
            },
            kind_);
    }

    /// Largest breakpoint, or 1 when the function has none.
    double characteristic_scale() const {
        const auto xs = breakpoints();
        return xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
    }

  private:
    explicit ScalarFunction(Kind k) : kind_(std::move(k)) {}

    static void require_positive(double v, const char *what) {
        if (!(v > 0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(what) + " must be finite and > 0");
    }

    static Complex eval(const fn::Identity &, double x) { return x; }
    static Complex eval(const fn::Scale &k, double x) { return k.alpha * x; }
    static Complex eval(const fn::SoftThreshold &k, double x) { return std::max(x - k.tau, 0.0); }
    static Complex eval(const fn::HardThreshold &k, double x) { return x > k.tau ? x : 0.0; }
    static Complex eval(const fn::Clip &k, double x) { return std::min(x, k.c); }
    static Complex eval(const fn::Power &k, double x) { return std::pow(x, k.p); }
    static Complex eval(const fn::PiecewiseLinear &k, double x) {
        const auto &kn = k.knots;
        if (x >= kn.back().x)
            return kn.back().value;
        auto hi = std::upper_bound(kn.begin(), kn.end(), x,
                                   [](double v, const fn::Knot &q) { return v < q.x; });
        auto lo = hi - 1;
        if (x == lo->x)
            return lo->value;
        const double s = (x - lo->x) / (hi->x - lo->x);
        return lo->value + (hi->value - lo->value) * s;
    }

    Kind kind_;
};

inline Complex evaluate(const ScalarFunction &f, double x) { return f(x); }

// ---------------------------------------------------------------------------
// Lipschitz moduli

enum class ModulusMethod { analytic, sampled };

inline const char *to_string(ModulusMethod m) {
    return m == ModulusMethod::analytic ? "analytic" : "sampled";
}

/// A Lipschitz modulus; +inf encodes "not Lipschitz".
struct Modulus {
    double value = 0.0;
    ModulusMethod method = ModulusMethod::analytic;

    bool finite() const { return std::isfinite(value); }
};

struct LipschitzModuli {
    Modulus lip;
    Modulus lip_c;  ///< certified lower bound on the complex modulus
    /// Proven upper bound on the complex modulus: lip for real f, sqrt(2) lip otherwise.
    double lip_c_upper = 0.0;
};

inline double default_domain_cap(const ScalarFunction &f) { return 10.0 * f.characteristic_scale(); }

/// Exact Lipschitz modulus on [0, domain_cap]. For piecewise-linear paths the
/// modulus is the largest segment speed.
inline Modulus lip_modulus(const ScalarFunction &f, double domain_cap) {
    if (!(domain_cap > 0))
        throw std::invalid_argument("lip_modulus: domain_cap must be > 0");
    const double v = std::visit(
        [domain_cap](const auto &k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, fn::Identity>)
                return 1.0;
            else if constexpr (std::is_same_v<T, fn::Scale>)
                return std::abs(k.alpha);
            else if constexpr (std::is_same_v<T, fn::SoftThreshold>)
                return domain_cap > k.tau ? 1.0 : 0.0;
            else if constexpr (std::is_same_v<T, fn::Clip>)
                return 1.0;
            else if constexpr (std::is_same_v<T, fn::HardThreshold>)
                // jump of height tau at tau; only harmless if the cap sits below it
                return domain_cap > k.tau ? kInfinity : 0.0;
            else if constexpr (std::is_same_v<T, fn::Power>)
                return k.p == 1.0 ? 1.0 : kInfinity;
            else {
                double speed = 0.0;
                for (std::size_t i = 1; i < k.knots.size(); ++i) {
                    if (k.knots[i - 1].x >= domain_cap)
                        break;
                    const auto &a = k.knots[i - 1];
                    const auto &b = k.knots[i];
                    speed = std::max(speed, std::abs(b.value - a.value) / (b.x - a.x));
                }
                return speed;
            }
        },
        f.kind());
    return {v, ModulusMethod::analytic};
}

inline Modulus lip_modulus(const ScalarFunction &f) { return lip_modulus(f, default_domain_cap(f)); }

namespace detail {

/// Sample abscissae on [0, cap]: a uniform grid, the breakpoints, midpoints
/// between consecutive breakpoints, and points just either side of each one.
inline std::vector<double> sample_points(const ScalarFunction &f, double cap, int grid) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(grid) + 16);
    for (int i = 0; i <= grid; ++i)
        xs.push_back(cap * static_cast<double>(i) / grid);
    auto bps = f.breakpoints();
    std::sort(bps.begin(), bps.end());
    double prev = 0.0;
    for (double b : bps) {
        if (b > cap)
            break;
        xs.push_back(b);
        xs.push_back(0.5 * (prev + b));
        for (double rel : {1e-6, 1e-3})
            for (double side : {-1.0, 1.0}) {
                const double x = b * (1.0 + side * rel);
                if (x >= 0 && x <= cap)
                    xs.push_back(x);
            }
        prev = b;
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

/// Angles probed before golden-section refinement: uniform on (-pi, pi] plus
/// a logarithmic ladder towards 0, where x - c y is smallest for x ~ y.
inline const std::vector<double> &probe_angles() {
    static const std::vector<double> angles = [] {
        std::vector<double> a;
        constexpr int uniform = 128;
        for (int i = 1; i <= uniform; ++i)
            a.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * i / uniform);
        for (int e = 1; e <= 7; ++e)
            for (double m : {1.0, 2.0, 5.0}) {
                const double t = m * std::pow(10.0, -e);
                a.push_back(t);
                a.push_back(-t);
            }
        a.push_back(0.0);
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        return a;
    }();
    return angles;
}

}  // namespace detail

/// |fx - c fy| / |x - c y| with c = e^{i theta}; NaN when the denominator is
/// below `degenerate_tol` relative to max(x, y).
inline double phase_ratio(double x, double y, Complex fx, Complex fy, double theta,
                          double degenerate_tol = 1e-12) {
    const Complex c = std::polar(1.0, theta);
    const double den = std::abs(Complex(x, 0.0) - c * y);
    if (den <= degenerate_tol * std::max({x, y, 1e-300}))
        return std::numeric_limits<double>::quiet_NaN();
    return std::abs(fx - c * fy) / den;
}

struct PhaseSearchResult {
    double theta = 0.0;
    double ratio = 0.0;  ///< 0 if every probed angle was degenerate
};

/// Maximises |f(x) - c f(y)| / |x - c y| over unimodular c: probe the angle
/// ladder, then golden-section search the bracket around the best probe.
/// The returned ratio is an attained value, hence a certified lower bound.
inline PhaseSearchResult best_phase(double x, double y, Complex fx, Complex fy,
                                    int golden_iterations = 60) {
    const auto &angles = detail::probe_angles();
    PhaseSearchResult best;
    std::size_t best_i = 0;
    bool any = false;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double r = phase_ratio(x, y, fx, fy, angles[i]);
        if (std::isnan(r))
            continue;
        if (!any || r > best.ratio) {
            best = {angles[i], r};
            best_i = i;
            any = true;
        }
    }
    if (!any)
        return best;

    double lo = best_i > 0 ? angles[best_i - 1] : angles.back() - 2.0 * std::numbers::pi;
    double hi = best_i + 1 < angles.size() ? angles[best_i + 1] : angles.front() + 2.0 * std::numbers::pi;
    auto score = [&](double th) {
        const double r = phase_ratio(x, y, fx, fy, th);
        if (std::isnan(r))
            return -1.0;
        if (r > best.ratio)
            best = {th, r};
        return r;
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - g * (hi - lo);
    double b = lo + g * (hi - lo);
    double fa = score(a), fb = score(b);
    for (int it = 0; it < golden_iterations; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = score(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = score(a);
        }
    }
    return best;
}

/// Sampled lower bound on the Lipschitz modulus over [0, domain_cap].
inline Modulus sampled_lip_modulus(const ScalarFunction &f, double domain_cap, int grid = 256) {
    const auto xs = detail::sample_points(f, domain_cap, grid);
    std::vector<Complex> fx(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        fx[i] = f(xs[i]);
    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            best = std::max(best, std::abs(fx[i] - fx[j]) / (xs[i] - xs[j]));
    return {best, ModulusMethod::sampled};
}

/// Certified lower bound on sup |f(x) - c f(y)| / |x - c y| over x, y in
/// [0, domain_cap] and |c| = 1. Requires a finite Lipschitz modulus.
inline double lip_c_modulus(const ScalarFunction &f, double domain_cap, int grid = 64) {
    if (grid < 1)
        throw std::invalid_argument("lip_c_modulus: grid must be >= 1");
    if (!lip_modulus(f, domain_cap).finite())
        throw std::domain_error("lip_c_modulus: function is not Lipschitz on the domain");
    const auto xs = detail::sample_points(f, domain_cap, grid);
    std::vector<Complex> fx(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        fx[i] = f(xs[i]);
    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (xs[i] == 0.0 && xs[j] == 0.0)
                continue;
            best = std::max(best, best_phase(xs[i], xs[j], fx[i], fx[j]).ratio);
        }
    return best;
}

inline LipschitzModuli lipschitz_moduli(const ScalarFunction &f, double domain_cap, int grid = 64) {
    LipschitzModuli m;
    m.lip = lip_modulus(f, domain_cap);
    if (!m.lip.finite()) {
        m.lip_c = {kInfinity, ModulusMethod::analytic};
        m.lip_c_upper = kInfinity;
        return m;
    }
    m.lip_c = {lip_c_modulus(f, domain_cap, grid), ModulusMethod::sampled};
    m.lip_c_upper = f.is_real_valued() ? m.lip.value : kSqrt2 * m.lip.value;
    return m;
}

// ---------------------------------------------------------------------------
// Extremal constructions

/// Unit-speed path through (0,0), (1,1), (1+|w-1|, w). Its complex modulus
/// approaches sqrt(2) as w -> 1 along w = 1 - it.
inline ScalarFunction tight_function(Complex w) {
    const double gap = std::abs(w - 1.0);
    if (!(gap > 0) || !std::isfinite(gap))
        throw std::invalid_argument("tight_function: w must be finite and != 1");
    return ScalarFunction::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}, {1.0 + gap, w}});
}

/// |w - c| / |1 + |w-1| - c|, bounded by sqrt(2) for every w and |c| = 1.
inline double maxnorm_ratio(Complex w, Complex c) {
    if (std::abs(std::abs(c) - 1.0) > 1e-12)
        throw std::invalid_argument("maxnorm_ratio: c must be unimodular");
    const double den = std::abs(1.0 + std::abs(w - 1.0) - c);
    if (!(den > 1e-15))
        throw std::domain_error("maxnorm_ratio: degenerate denominator");
    return std::abs(w - c) / den;
}

/// 2|1 + |w-1| - c|^2 - |w - c|^2 in expanded form; nonnegative exactly when
/// maxnorm_ratio(w, c) <= sqrt(2).
inline double maxnorm_expanded(Complex w, Complex c) {
    const double r = std::abs(w - 1.0);
    return std::norm(w) + 5.0 - 4.0 * w.real() + 4.0 * r -
           2.0 * (std::conj(c) * (2.0 * (1.0 + r) - w)).real();
}

/// The expanded form minimised over all unimodular c.
inline double maxnorm_worst_case(Complex w) {
    const double r = std::abs(w - 1.0);
    return std::norm(w) + 5.0 - 4.0 * w.real() + 4.0 * r - 2.0 * std::abs(2.0 * (1.0 + r) - w);
}

/// |1 - e^{it} - it| / |1 - e^{it} + |t||, i.e. maxnorm_ratio(1 - it, e^{it}).
/// Tends to sqrt(2) as t -> 0 from either side.
inline double extremal_ratio(double t) {
    if (!(t != 0.0) || !std::isfinite(t))
        throw std::invalid_argument("extremal_ratio: t must be finite and nonzero");
    // 1 - e^{it} = 2 sin^2(t/2) - i sin t, without cancellation
    const double h = std::sin(0.5 * t);
    const Complex one_minus_c(2.0 * h * h, -std::sin(t));
    const double den = std::abs(one_minus_c + std::abs(t));
    if (!(den > 1e-300))
        throw std::domain_error("extremal_ratio: degenerate denominator");
    return std::abs(one_minus_c - Complex(0.0, t)) / den;
}

}  // namespace svcalc
