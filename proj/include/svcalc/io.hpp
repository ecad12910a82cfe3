#pragma once

// JSON and CSV formats.
//
//   matrix:        {"rows": d, "cols": r, "entries": [[re, im], ...]}   row-major
//   decomposition: {"terms": [{"weight": w, "perm": [1-based], "phases": [[re, im], ...]}]}
//   report:        {"config": {...}, "max_ratio": r, "bound": b, "bound_kind": "...",
//                   "pass": true|false|"not-applicable", "trials": N, "seed": s, "runtime_sec": t}

#include "svcalc/cdss.hpp"
#include "svcalc/core_matrix.hpp"
#include "svcalc/function_dsl.hpp"
#include "svcalc/verifier.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace svcalc {

using Json = nlohmann::json;

struct FormatError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace io {

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json &j, const char *what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw FormatError(std::string(what) + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace io

inline Json matrix_to_json(const ComplexMatrix &A) {
    Json entries = Json::array();
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            entries.push_back(io::complex_to_json(A(i, j)));
    return Json{{"rows", A.rows()}, {"cols", A.cols()}, {"entries", std::move(entries)}};
}

inline ComplexMatrix matrix_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw FormatError("matrix: expected object with rows, cols, entries");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
        throw FormatError("matrix: rows and cols must be integers");
    const auto rows = j["rows"].get<long long>();
    const auto cols = j["cols"].get<long long>();
    if (rows < 1 || cols < 1)
        throw FormatError("matrix: rows and cols must be positive");
    const Json &e = j["entries"];
    if (!e.is_array() || static_cast<long long>(e.size()) != rows * cols)
        throw FormatError("matrix: entries length must equal rows * cols");
    ComplexMatrix A(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long k = 0; k < cols; ++k)
            A(i, k) = io::complex_from_json(e[static_cast<std::size_t>(i * cols + k)], "matrix entry");
    if (!all_finite(A))
        throw FormatError("matrix: entries must be finite");
    return A;
}

inline Json decomposition_to_json(const CdssDecomposition &dec) {
    Json terms = Json::array();
    for (const auto &t : dec.terms) {
        Json perm = Json::array();
        Json phases = Json::array();
        for (Index j = 0; j < dec.dimension; ++j) {
            perm.push_back(t.pp.perm[j] + 1);
            phases.push_back(io::complex_to_json(t.pp.phases[j]));
        }
        terms.push_back({{"weight", t.weight}, {"perm", std::move(perm)}, {"phases", std::move(phases)}});
    }
    return Json{{"terms", std::move(terms)}};
}

inline CdssDecomposition decomposition_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
        throw FormatError("decomposition: expected non-empty terms array");
    CdssDecomposition dec;
    for (const auto &t : j["terms"]) {
        if (!t.contains("weight") || !t.contains("perm") || !t.contains("phases"))
            throw FormatError("decomposition: term needs weight, perm, phases");
        CdssTerm term;
        term.weight = t["weight"].get<double>();
        for (const auto &p : t["perm"])
            term.pp.perm.push_back(p.get<Index>() - 1);
        for (const auto &g : t["phases"])
            term.pp.phases.push_back(io::complex_from_json(g, "phase"));
        try {
            term.pp.validate();
        } catch (const std::invalid_argument &e) {
            throw FormatError(std::string("decomposition: ") + e.what());
        }
        if (dec.terms.empty())
            dec.dimension = term.pp.dimension();
        else if (term.pp.dimension() != dec.dimension)
            throw FormatError("decomposition: inconsistent term dimensions");
        if (!(term.weight >= 0))
            throw FormatError("decomposition: weights must be nonnegative");
        dec.terms.push_back(std::move(term));
    }
    return dec;
}

/// Infinite bounds are written as the string "inf".
inline Json report_to_json(const VerificationReport &rep) {
    const auto &c = rep.config;
    Json config{{"function", to_dsl(c.function)},
                {"dimension", c.dimension},
                {"trials", c.trials},
                {"seed", c.seed},
                {"matrix_scale", c.matrix_scale},
                {"perturbation_scale", c.perturbation_scale},
                {"tol_bound", c.tol_bound},
                {"use_lip_c", c.use_lip_c}};
    Json j{{"config", std::move(config)},
           {"max_ratio", rep.max_ratio},
           {"bound_kind", to_string(rep.bound_kind)},
           {"trials", c.trials},
           {"seed", c.seed},
           {"runtime_sec", rep.runtime_sec}};
    if (std::isfinite(rep.bound_used))
        j["bound"] = rep.bound_used;
    else
        j["bound"] = "inf";
    if (rep.applicable)
        j["pass"] = rep.pass;
    else
        j["pass"] = "not-applicable";
    return j;
}

inline void write_trials_csv(std::ostream &os, const VerificationReport &rep) {
    os << "trial_index,ratio\n" << std::setprecision(17);
    for (const auto &r : rep.records)
        os << r.index << ',' << r.ratio << '\n';
}

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

inline ComplexMatrix read_matrix_file(const std::string &path) {
    try {
        return matrix_from_json(read_json_file(path));
    } catch (const Json::exception &e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

}  // namespace svcalc
