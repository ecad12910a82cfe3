// svcalc: command-line front end for the singular value functional calculus.
//
// Exit codes: 0 success, 1 bound violated (verify), 2 parse/config error,
// 3 numerical failure, 4 input not cdss (decompose).

#include "svcalc/svcalc.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace svcalc;

enum Exit { kOk = 0, kBoundViolated = 1, kParseError = 2, kNumericalError = 3, kNotCdss = 4 };

void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write '" + path + "'");
    out << text;
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

struct RandomUnitarySpec {
    std::vector<long long> args;  // d, seed
    bool given() const { return !args.empty(); }
    Index d() const { return static_cast<Index>(args.at(0)); }
    std::uint64_t seed() const { return static_cast<std::uint64_t>(args.at(1)); }
};

Json eigenvalues_json(const std::vector<Complex> &ev) {
    Json a = Json::array();
    for (auto z : ev)
        a.push_back(Json::array({z.real(), z.imag()}));
    return a;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Singular value functional calculus and Lipschitz verification toolkit"};
    app.require_subcommand(1);

    std::string fdsl, in_path, out_path, csv_path, a_path, b_path;
    Index dim = 4;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    double tol = 0.0;
    bool tol_given = false;

    auto *apply = app.add_subcommand("apply", "Write f_s(A) for a matrix file");
    apply->add_option("--f", fdsl, "Scalar function, e.g. soft:tau=1.5")->required();
    apply->add_option("--in", in_path, "Input matrix JSON")->required();
    apply->add_option("--out", out_path, "Output matrix JSON (default stdout)");

    double cap = 0.0;
    int grid = 64;
    auto *moduli = app.add_subcommand("moduli", "Lipschitz and complex-Lipschitz moduli of f");
    moduli->add_option("--f", fdsl, "Scalar function")->required();
    moduli->add_option("--cap", cap, "Domain cap (default 10x the largest breakpoint)");
    moduli->add_option("--grid", grid, "Grid size for the complex modulus scan")->check(CLI::PositiveNumber);
    moduli->add_option("--out", out_path, "Output JSON");

    double matrix_scale = 1.0, perturbation_scale = 1e-3;
    bool use_lip_c = false;
    auto *verify = app.add_subcommand("verify", "Randomized check of the operator Lipschitz bound");
    verify->add_option("--f", fdsl, "Scalar function")->required();
    verify->add_option("--dim", dim, "Matrix dimension")->check(CLI::PositiveNumber);
    verify->add_option("--trials", trials, "Number of trial pairs")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Random seed (default 0)");
    verify->add_option("--scale", matrix_scale, "Matrix scale")->check(CLI::PositiveNumber);
    verify->add_option("--perturbation", perturbation_scale, "Relative perturbation size")
        ->check(CLI::PositiveNumber);
    verify->add_option("--tol", tol, "Relative bound tolerance (default 1e-9)");
    verify->add_flag("--lip-c", use_lip_c, "Compare against the sampled complex modulus");
    verify->add_option("--out", out_path, "Report JSON");
    verify->add_option("--csv", csv_path, "Per-trial CSV");

    RandomUnitarySpec ru;
    auto *decomp = app.add_subcommand("decompose", "Decompose a cdss matrix into permutation-phase matrices");
    decomp->add_option("--in", in_path, "Input matrix JSON");
    decomp->add_option("--random-unitary", ru.args,
                       "Use U1 . U2 for random unitaries of size d from seed (args: d seed)")
        ->expected(2);
    decomp->add_option("--tol", tol, "cdss membership tolerance (default 1e-12)");
    decomp->add_option("--out", out_path, "Decomposition JSON");

    std::vector<long long> random_pair;
    auto *idcheck = app.add_subcommand("identity-check", "Frobenius distance identity for two matrices");
    idcheck->add_option("--a", a_path, "Matrix A JSON");
    idcheck->add_option("--b", b_path, "Matrix B JSON");
    idcheck->add_option("--random", random_pair, "Random Gaussian pair (args: d seed)")->expected(2);
    idcheck->add_option("--tol", tol, "Relative identity tolerance (default 1e-8)");
    idcheck->add_option("--out", out_path, "Result JSON");

    double t_min = 1e-6, t_max = 1e-1;
    int points = 6;
    auto *scan = app.add_subcommand("extremal-scan", "Ratio along w = 1 - it, c = e^{it}");
    scan->add_option("--t-min", t_min, "Smallest t");
    scan->add_option("--t-max", t_max, "Largest t");
    scan->add_option("--points", points, "Number of log-spaced points");
    scan->add_option("--out", out_path, "CSV output");

    auto *cmpn = app.add_subcommand("compare-normal", "Compare f_s(A) with the spectral f(A) for normal A");
    cmpn->add_option("--f", fdsl, "Plane function, e.g. monomial:k=2")->required();
    cmpn->add_option("--in", in_path, "Normal matrix JSON")->required();
    cmpn->add_option("--tol", tol, "Equality tolerance (default 1e-9)");
    cmpn->add_option("--out", out_path, "Result JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParseError;
    }
    for (auto *sc : {verify, decomp, idcheck, cmpn})
        if (sc->parsed() && sc->count("--tol"))
            tol_given = true;

    try {
        if (apply->parsed()) {
            const ScalarFunction f = parse_function(fdsl);
            const ComplexMatrix A = read_matrix_file(in_path);
            write_output(out_path, dump(matrix_to_json(apply_svfc(f, A))));
            return kOk;
        }

        if (moduli->parsed()) {
            const ScalarFunction f = parse_function(fdsl);
            const double c = cap > 0 ? cap : default_domain_cap(f);
            const auto m = lipschitz_moduli(f, c, grid);
            auto num = [](double v) -> Json { return std::isfinite(v) ? Json(v) : Json("inf"); };
            Json j{{"function", to_dsl(f)},     {"domain_cap", c},
                   {"real_valued", f.is_real_valued()},
                   {"lip", num(m.lip.value)},   {"lip_method", to_string(m.lip.method)},
                   {"lip_c", num(m.lip_c.value)}, {"lip_c_method", to_string(m.lip_c.method)},
                   {"lip_c_upper", num(m.lip_c_upper)}};
            write_output(out_path, dump(j));
            return kOk;
        }

        if (verify->parsed()) {
            TrialConfig cfg;
            cfg.function = parse_function(fdsl);
            cfg.dimension = dim;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.matrix_scale = matrix_scale;
            cfg.perturbation_scale = perturbation_scale;
            cfg.use_lip_c = use_lip_c;
            if (tol_given)
                cfg.tol_bound = tol;
            try {
                cfg.validate();
            } catch (const std::invalid_argument &e) {
                std::cerr << "config error: " << e.what() << "\n";
                return kParseError;
            }
            const auto rep = verify_bound(cfg);
            write_output(out_path, dump(report_to_json(rep)));
            if (!csv_path.empty()) {
                std::ostringstream os;
                write_trials_csv(os, rep);
                write_output(csv_path, os.str());
            }
            if (!rep.applicable) {
                std::cerr << "not-applicable: " << fdsl << " is not Lipschitz\n";
                return kOk;
            }
            return rep.pass ? kOk : kBoundViolated;
        }

        if (decomp->parsed()) {
            ComplexMatrix M;
            if (ru.given()) {
                if (ru.d() < 1)
                    throw FormatError("--random-unitary: d must be >= 1");
                M = hadamard(random_unitary(ru.d(), ru.seed()), random_unitary(ru.d(), ru.seed() + 1));
            } else if (!in_path.empty()) {
                M = read_matrix_file(in_path);
            } else {
                throw FormatError("decompose: one of --in or --random-unitary is required");
            }
            if (M.rows() != M.cols())
                throw FormatError("decompose: matrix must be square");
            const double mtol = tol_given ? tol : 1e-12;
            if (!is_cdss(M, mtol)) {
                std::cerr << "input is not complex doubly substochastic (max line sum "
                          << max_line_sum(M) << ")\n";
                return kNotCdss;
            }
            const auto dec = decompose(M, mtol);
            const double err = (dec.reconstruct() - M).norm();
            write_output(out_path, dump(decomposition_to_json(dec)));
            std::fprintf(out_path.empty() ? stderr : stdout,
                         "terms: %zu  weight_sum: %.17g  reconstruction_error: %.3e\n", dec.terms.size(),
                         dec.weight_sum(), err);
            return kOk;
        }

        if (idcheck->parsed()) {
            ComplexMatrix A, B;
            if (!random_pair.empty()) {
                if (random_pair[0] < 1)
                    throw FormatError("--random: d must be >= 1");
                Rng rng = trial_rng(static_cast<std::uint64_t>(random_pair[1]), 0, 0x1d);
                A = random_gaussian(random_pair[0], random_pair[0], rng);
                B = random_gaussian(random_pair[0], random_pair[0], rng);
            } else if (!a_path.empty() && !b_path.empty()) {
                A = read_matrix_file(a_path);
                B = read_matrix_file(b_path);
            } else {
                throw FormatError("identity-check: give --a and --b, or --random d seed");
            }
            const double itol = tol_given ? tol : 1e-8;
            const auto res = distance_identity_check(A, B);
            Json j{{"lhs", res.lhs},
                   {"rhs", res.rhs},
                   {"abs_diff", std::abs(res.lhs - res.rhs)},
                   {"tolerance", itol},
                   {"terms", res.decomposition.terms.size()},
                   {"holds", res.holds(itol)}};
            write_output(out_path, dump(j));
            return res.holds(itol) ? kOk : kNumericalError;
        }

        if (scan->parsed()) {
            if (!(t_min > 0) || !(t_max > t_min) || points < 2 || !std::isfinite(t_max)) {
                std::cerr << "extremal-scan: need 0 < t-min < t-max and points >= 2\n";
                return kParseError;
            }
            std::ostringstream os;
            os << "t,extremal_ratio,scalar_tightness\n" << std::setprecision(17);
            const double lmin = std::log10(t_min), lmax = std::log10(t_max);
            for (int i = 0; i < points; ++i) {
                const double t = i == 0           ? t_min
                                 : i == points - 1 ? t_max
                                                   : std::pow(10.0, lmin + (lmax - lmin) * i / (points - 1));
                os << t << ',' << extremal_ratio(t) << ',' << scalar_tightness(t) << '\n';
            }
            write_output(out_path, os.str());
            return kOk;
        }

        if (cmpn->parsed()) {
            const PlaneFunction g = parse_plane_function(fdsl);
            const ComplexMatrix A = read_matrix_file(in_path);
            Tolerances tols;
            if (tol_given)
                tols.identity = tol;
            tols.validate();
            if (!is_normal(A, tols.identity)) {
                std::cerr << "compare-normal: matrix is not normal\n";
                return kParseError;
            }
            const auto cmp = compare_normal(g, A, tols);
            Json cond = Json::array();
            for (bool b : cmp.eigen_condition_holds)
                cond.push_back(b);
            Json j{{"function", fdsl},
                   {"fs_result", matrix_to_json(cmp.fs_result)},
                   {"cfc_result", matrix_to_json(cmp.cfc_result)},
                   {"eigenvalues", eigenvalues_json(cmp.eigenvalues)},
                   {"eigen_condition_holds", std::move(cond)},
                   {"condition_holds_everywhere", cmp.condition_holds_everywhere()},
                   {"difference", cmp.max_difference},
                   {"results_equal", cmp.results_equal}};
            write_output(out_path, dump(j));
            return kOk;
        }
    } catch (const NotCdssError &e) {
        std::cerr << e.what() << "\n";
        return kNotCdss;
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const std::exception &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    }
    return kParseError;
}
