#pragma once

// Text form of scalar functions used on the command line:
//
//   identity
//   scale:re=<a>,im=<b>
//   soft:tau=<t>        hard:tau=<t>        clip:c=<c>        power:p=<p>
//   pwl:knots=x,re,im;x,re,im;...
//   tight:re=<a>,im=<b>                      (tight_function(a + ib))
//
// Plane functions for the spectral calculus:
//   monomial:k=<k>[,re=<a>,im=<b>]           (alpha z^k, alpha defaults to 1)
//   linear:re=<a>,im=<b>                     (alpha z)
//   any scalar form above                    (z -> f(|z|))

#include "svcalc/scalar_functions.hpp"
#include "svcalc/svfc.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace svcalc {

struct DslError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace dsl {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline double parse_number(const std::string &s, const std::string &context) {
    double v = 0.0;
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw DslError("invalid number '" + s + "' in " + context);
    return v;
}

/// Splits "name:k=v,k=v" into the name and a key -> value map. A comma-separated
/// piece without '=' continues the previous value (knot lists contain commas).
inline std::pair<std::string, std::map<std::string, std::string>> tokenize(std::string_view text) {
    const std::string src = trim(text);
    if (src.empty())
        throw DslError("empty function specification");
    const auto colon = src.find(':');
    std::string name = trim(std::string_view(src).substr(0, colon));
    std::map<std::string, std::string> params;
    if (colon == std::string::npos)
        return {name, params};

    std::string last_key;
    for (const auto &piece : split(std::string_view(src).substr(colon + 1), ',')) {
        const auto eq = piece.find('=');
        if (eq == std::string::npos) {
            if (last_key.empty())
                throw DslError("parameter '" + piece + "' lacks a key in '" + src + "'");
            params[last_key] += "," + piece;
            continue;
        }
        last_key = trim(std::string_view(piece).substr(0, eq));
        if (last_key.empty())
            throw DslError("empty parameter name in '" + src + "'");
        if (params.count(last_key))
            throw DslError("duplicate parameter '" + last_key + "' in '" + src + "'");
        params[last_key] = trim(std::string_view(piece).substr(eq + 1));
    }
    return {name, params};
}

class Params {
  public:
    Params(std::string fname, std::map<std::string, std::string> p)
        : fname_(std::move(fname)), p_(std::move(p)) {}

    double number(const std::string &key) {
        auto it = p_.find(key);
        if (it == p_.end())
            throw DslError(fname_ + ": missing parameter '" + key + "'");
        const double v = parse_number(it->second, fname_ + "." + key);
        p_.erase(it);
        return v;
    }

    double number_or(const std::string &key, double fallback) {
        return p_.count(key) ? number(key) : fallback;
    }

    std::string text(const std::string &key) {
        auto it = p_.find(key);
        if (it == p_.end())
            throw DslError(fname_ + ": missing parameter '" + key + "'");
        std::string v = it->second;
        p_.erase(it);
        return v;
    }

    void finish() const {
        if (!p_.empty())
            throw DslError(fname_ + ": unknown parameter '" + p_.begin()->first + "'");
    }

  private:
    std::string fname_;
    std::map<std::string, std::string> p_;
};

inline std::vector<fn::Knot> parse_knots(const std::string &text) {
    std::vector<fn::Knot> knots;
    for (const auto &triple : split(text, ';')) {
        const auto parts = split(triple, ',');
        if (parts.size() != 3)
            throw DslError("pwl: knot '" + triple + "' must be x,re,im");
        knots.push_back({parse_number(parts[0], "pwl knot"),
                         {parse_number(parts[1], "pwl knot"), parse_number(parts[2], "pwl knot")}});
    }
    return knots;
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace dsl

inline ScalarFunction parse_function(std::string_view text) {
    auto [name, raw] = dsl::tokenize(text);
    dsl::Params p(name, std::move(raw));
    auto build = [&]() -> ScalarFunction {
        if (name == "identity" || name == "id")
            return ScalarFunction::identity();
        if (name == "scale")
            return ScalarFunction::scale({p.number_or("re", 0.0), p.number_or("im", 0.0)});
        if (name == "soft")
            return ScalarFunction::soft_threshold(p.number("tau"));
        if (name == "hard")
            return ScalarFunction::hard_threshold(p.number("tau"));
        if (name == "clip")
            return ScalarFunction::clip(p.number("c"));
        if (name == "power")
            return ScalarFunction::power(p.number("p"));
        if (name == "pwl")
            return ScalarFunction::piecewise_linear(dsl::parse_knots(p.text("knots")));
        if (name == "tight")
            return tight_function({p.number_or("re", 0.0), p.number_or("im", 0.0)});
        throw DslError("unknown function '" + name + "'");
    };
    try {
        ScalarFunction f = build();
        p.finish();
        return f;
    } catch (const DslError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw DslError(e.what());
    }
}

/// Canonical text form; parse_function(to_dsl(f)) reproduces f exactly.
inline std::string to_dsl(const ScalarFunction &f) {
    using dsl::format_number;
    return std::visit(
        [](const auto &k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, fn::Identity>)
                return "identity";
            else if constexpr (std::is_same_v<T, fn::Scale>)
                return "scale:re=" + format_number(k.alpha.real()) +
                       ",im=" + format_number(k.alpha.imag());
            else if constexpr (std::is_same_v<T, fn::SoftThreshold>)
                return "soft:tau=" + format_number(k.tau);
            else if constexpr (std::is_same_v<T, fn::HardThreshold>)
                return "hard:tau=" + format_number(k.tau);
            else if constexpr (std::is_same_v<T, fn::Clip>)
                return "clip:c=" + format_number(k.c);
            else if constexpr (std::is_same_v<T, fn::Power>)
                return "power:p=" + format_number(k.p);
            else {
                std::string s = "pwl:knots=";
                for (std::size_t i = 0; i < k.knots.size(); ++i) {
                    if (i)
                        s += ';';
                    s += format_number(k.knots[i].x) + "," + format_number(k.knots[i].value.real()) +
                         "," + format_number(k.knots[i].value.imag());
                }
                return s;
            }
        },
        f.kind());
}

inline PlaneFunction parse_plane_function(std::string_view text) {
    auto [name, raw] = dsl::tokenize(text);
    if (name != "monomial" && name != "linear")
        return PlaneFunction::radial(parse_function(text));
    dsl::Params p(name, std::move(raw));
    try {
        const Complex alpha(p.number_or("re", 1.0), p.number_or("im", 0.0));
        int k = 1;
        if (name == "monomial") {
            const double kv = p.number("k");
            if (kv != std::floor(kv) || kv < 1 || kv > 64)
                throw DslError("monomial: k must be an integer in [1, 64]");
            k = static_cast<int>(kv);
        }
        p.finish();
        return PlaneFunction::monomial(k, alpha);
    } catch (const DslError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw DslError(e.what());
    }
}

}  // namespace svcalc
