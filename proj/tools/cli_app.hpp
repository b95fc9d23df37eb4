#pragma once

// Command-line front end. `run` takes the argument list without the program
// name and writes to the given streams, so tests can drive it in-process.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ptrunk/emit.hpp"
#include "ptrunk/parse.hpp"
#include "ptrunk/ptrunk.hpp"

namespace ptrunk::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kBudget = 3, kMismatch = 4, kDepth = 5 };

inline int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::budget: return kBudget;
        case ErrorCode::verification_mismatch: return kMismatch;
        case ErrorCode::insufficient_depth:
        case ErrorCode::unstabilized: return kDepth;
        default: return kUsage;
    }
}

inline std::uint64_t env_or(const char* name, std::uint64_t fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::usage, std::string("environment variable ") + name + " is not a natural number");
    }
}

struct Settings {
    std::string poly;
    std::uint64_t p = 0;
    std::optional<std::size_t> nvars;
    std::uint64_t e = 0;
    std::optional<std::uint64_t> max_e;
    std::uint64_t truncate = 10;
    std::uint64_t max_height = 3;
    std::string emit = "text";
    bool reconstruct = false;
    bool certify = false;
    bool no_certify = false;
    bool no_prune = false;
    bool pade = false;
    std::optional<unsigned> u, v;
    std::size_t guard = 10;
    std::string modulus;
    std::uint64_t budget_roots = env_or("PTRUNK_BUDGET_ROOTS", 1'000'000);
    std::uint64_t budget_brute = env_or("PTRUNK_BUDGET_BRUTE", 100'000'000);
    std::uint64_t budget_vertices = env_or("PTRUNK_BUDGET_VERTICES", 1'000'000);
    std::uint64_t budget_enum = env_or("PTRUNK_BUDGET_ENUM", 1'000'000);
    std::uint64_t max_prime = 1'000'000;
};

class App {
public:
    App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(std::vector<std::string> args) {
        CLI::App app{"Solve polynomial congruences modulo prime powers via the trunk."};
        app.require_subcommand(1);
        app.set_help_all_flag("--help-all");

        auto common = [&](CLI::App* sc, bool needs_p = true) {
            sc->add_option("--poly", s_.poly, "polynomial, e.g. \"x^2 - y^3\"")->required();
            auto* po = sc->add_option("--p", s_.p, "prime modulus base");
            if (needs_p) po->required();
            sc->add_option("--nvars", s_.nvars, "number of variables (default: inferred)");
            sc->add_option("--emit", s_.emit, "output format")->check(CLI::IsMember({"json", "dot", "text"}));
            sc->add_option("--budget-roots", s_.budget_roots, "max p^n root-search evaluations");
            sc->add_option("--budget-brute", s_.budget_brute, "max p^(ne) brute-force evaluations");
            sc->add_option("--budget-vertices", s_.budget_vertices, "max trunk vertices");
            sc->add_option("--budget-enum", s_.budget_enum, "max enumerated solutions");
            sc->add_option("--max-prime", s_.max_prime, "largest accepted prime");
            sc->add_flag("--no-prune", s_.no_prune, "expand Hensel trees explicitly");
        };

        auto* trunk = app.add_subcommand("trunk", "build and print the trunk");
        common(trunk);
        trunk->add_option("--max-height", s_.max_height, "height bound H");
        trunk->add_flag("--certify", s_.certify, "replace certified model stalks by their closed form");

        auto* count = app.add_subcommand("count", "number of solutions mod p^e");
        common(count);
        count->add_option("--e", s_.e, "exponent e");
        count->add_option("--max-e", s_.max_e, "report N_0..N_E instead");
        count->add_flag("--no-certify", s_.no_certify, "do not use model-stalk closed forms");

        auto* enumerate = app.add_subcommand("enumerate", "list solutions mod p^e");
        common(enumerate);
        enumerate->add_option("--e", s_.e, "exponent e")->required();
        enumerate->add_flag("--no-certify", s_.no_certify, "do not use model-stalk closed forms");

        auto* series = app.add_subcommand("series", "Poincare series");
        common(series);
        series->add_option("--truncate", s_.truncate, "truncation order E");
        series->add_flag("--reconstruct", s_.reconstruct, "also print the rational function");
        series->add_flag("--no-certify", s_.no_certify, "do not use model-stalk closed forms");
        add_reconstruct_options(series);

        auto* recon = app.add_subcommand("reconstruct", "rational function from a truncated series");
        common(recon);
        recon->add_option("--truncate", s_.truncate, "truncation order E (raised to deg D + guard if lower)");
        recon->add_flag("--no-certify", s_.no_certify, "do not use model-stalk closed forms");
        add_reconstruct_options(recon);

        auto* verify = app.add_subcommand("verify", "compare trunk counts with brute force");
        common(verify);
        verify->add_option("--max-e", s_.max_e, "largest e to check")->required();
        verify->add_flag("--no-certify", s_.no_certify, "do not use model-stalk closed forms");

        auto* crt = app.add_subcommand("crt-count", "count modulo a factored composite");
        common(crt, false);
        crt->add_option("--n", s_.modulus, "factored modulus, e.g. \"2^1,5^1\"")->required();
        crt->add_flag("--no-certify", s_.no_certify, "do not use model-stalk closed forms");

        try {
            std::reverse(args.begin(), args.end());
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            const int rc = app.exit(e, out_, err_);
            return rc == 0 ? kOk : kUsage;
        }

        try {
            if (*trunk) return cmd_trunk();
            if (*count) return cmd_count();
            if (*enumerate) return cmd_enumerate();
            if (*series) return cmd_series();
            if (*recon) return cmd_reconstruct();
            if (*verify) return cmd_verify();
            if (*crt) return cmd_crt();
        } catch (const Error& e) {
            return fail(e);
        } catch (const std::exception& e) {
            return fail(Error(ErrorCode::usage, e.what()));
        }
        return kUsage;
    }

private:
    void add_reconstruct_options(CLI::App* sc) {
        sc->add_option("--u", s_.u, "candidate exponent u");
        sc->add_option("--v", s_.v, "candidate exponent v");
        sc->add_option("--guard", s_.guard, "guard coefficients");
        sc->add_flag("--pade", s_.pade, "fall back to generic Pade approximation");
    }

    int fail(const Error& e) {
        if (s_.emit == "json") {
            out_ << error_json(e).dump(2) << "\n";
        } else {
            err_ << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        }
        return exit_code_for(e.code());
    }

    Prime prime(std::uint64_t value) const {
        if (value > s_.max_prime) {
            throw Error(ErrorCode::invalid_prime, "p = " + std::to_string(value) + " exceeds --max-prime " +
                                                      std::to_string(s_.max_prime));
        }
        return Prime(value);
    }

    Polynomial polynomial() const {
        Polynomial P = parse_polynomial(s_.poly, s_.nvars);
        if (P.is_zero()) throw Error(ErrorCode::precondition, "the polynomial is zero; every point is a solution");
        return P;
    }

    BuildOptions options(bool certify) const {
        BuildOptions o;
        o.prune_hensel = !s_.no_prune;
        o.certify_stalks = certify;
        o.vertex_budget = s_.budget_vertices;
        o.root_budget = s_.budget_roots;
        return o;
    }

    Trunk trunk_for(const Polynomial& P, const Prime& p, std::uint64_t e, bool certify) const {
        BuildOptions o = options(certify);
        o.phi_bound = e;
        return build_trunk(P, p, e, o);
    }

    int cmd_trunk() {
        const Prime p = prime(s_.p);
        const Trunk T = build_trunk(polynomial(), p, s_.max_height, options(s_.certify));
        if (s_.emit == "json") {
            out_ << trunk_json(T).dump(2) << "\n";
        } else if (s_.emit == "dot") {
            out_ << trunk_dot(T);
        } else {
            out_ << trunk_text(T);
        }
        return kOk;
    }

    int cmd_count() {
        const Prime p = prime(s_.p);
        const std::uint64_t E = s_.max_e.value_or(s_.e);
        const Trunk T = trunk_for(polynomial(), p, E, !s_.no_certify);
        const CountReport rep = count_report(T, E);
        if (s_.emit == "json") {
            out_ << report_json(rep).dump(2) << "\n";
        } else if (s_.max_e) {
            for (std::uint64_t e = 0; e <= E; ++e) out_ << "N_" << e << " = " << rep.counts[e].get_str() << "\n";
        } else {
            out_ << rep.counts[E].get_str() << "\n";
        }
        return kOk;
    }

    int cmd_enumerate() {
        const Prime p = prime(s_.p);
        const Polynomial P = polynomial();
        const Trunk T = trunk_for(P, p, s_.e, !s_.no_certify);
        const SolutionSet S = enumerate_solutions(T, s_.e, s_.budget_enum, s_.budget_roots);
        verify_solutions(P, p, S);
        if (s_.emit == "json") {
            Json a = Json::array();
            for (const auto& sol : S.points) {
                a.push_back({{"point", point_json(sol.point)},
                             {"generator", {{"k", sol.generator_height}, {"residue", point_json(sol.generator_residue)}}}});
            }
            out_ << Json{{"p", p.value()}, {"e", S.e}, {"count", S.points.size()}, {"solutions", a}}.dump(2) << "\n";
        } else {
            for (const auto& sol : S.points) {
                for (std::size_t i = 0; i < sol.point.size(); ++i) out_ << (i ? " " : "") << sol.point[i].get_str();
                out_ << "\n";
            }
        }
        return kOk;
    }

    /// u, v for the candidate denominator: flags first, then a certificate at the root.
    std::optional<std::pair<unsigned, unsigned>> candidates(const Trunk& T) const {
        if (s_.u || s_.v) {
            if (!s_.u || !s_.v) throw Error(ErrorCode::usage, "--u and --v must be given together");
            return std::make_pair(*s_.u, *s_.v);
        }
        for (const auto& v : T.vertices) {
            if (v.certificate) return std::make_pair(v.certificate->u, v.certificate->v);
        }
        return std::nullopt;
    }

    /// Reconstruct from a truncated series; the trunk is rebuilt deep enough for the guard window.
    std::optional<RationalFunction> reconstruct_from_series(const Polynomial& P, const Prime& p,
                                                            std::optional<std::pair<unsigned, unsigned>> uv,
                                                            std::uint64_t min_order, std::string& method) const {
        std::optional<RationalFunction> f;
        if (uv) {
            const auto degD = candidate_denominator(uv->first, uv->second, p).degree();
            const std::uint64_t E = std::max<std::uint64_t>(min_order, degD + s_.guard);
            const SeriesTruncation s = truncated_series(trunk_for(P, p, E, !s_.no_certify), E);
            f = reconstruct_rational(s, uv->first, uv->second, p, s_.guard);
            method = "candidate-denominator";
        }
        if (!f && s_.pade) {
            const std::uint64_t E = std::max<std::uint64_t>(min_order, 2 * s_.guard + 10);
            const SeriesTruncation s = truncated_series(trunk_for(P, p, E, !s_.no_certify), E);
            f = pade_reconstruct(s, s_.guard);
            method = "pade";
        }
        return f;
    }

    void print_fraction(const RationalFunction& f, const Prime& p, std::optional<std::pair<unsigned, unsigned>> uv,
                        const std::string& method, const SeriesTruncation* s) {
        std::optional<std::string> fac;
        if (uv) fac = factored_form(f, uv->first, uv->second, p);
        if (s_.emit == "json") {
            Json j;
            if (s) j["series"] = series_json(*s);
            j["rational"] = rational_function_json(f, fac);
            j["method"] = method;
            out_ << j.dump(2) << "\n";
        } else {
            if (s) print_series_text(*s);
            out_ << "S(T) = " << to_string(f) << "\n";
            if (fac) out_ << "factored: " << *fac << "\n";
        }
    }

    void print_series_text(const SeriesTruncation& s) {
        for (std::size_t e = 0; e < s.coeffs.size(); ++e) out_ << "c_" << e << " = " << s.coeffs[e].get_str() << "\n";
    }

    int cmd_series() {
        const Prime p = prime(s_.p);
        const Polynomial P = polynomial();
        const std::uint64_t E = s_.truncate;
        const Trunk T = trunk_for(P, p, E, !s_.no_certify);
        const SeriesTruncation s = truncated_series(T, E);
        if (!s_.reconstruct) {
            if (s_.emit == "json") {
                out_ << Json{{"p", p.value()}, {"order", E}, {"series", series_json(s)}}.dump(2) << "\n";
            } else {
                print_series_text(s);
            }
            return kOk;
        }
        auto uv = candidates(T);
        std::string method = "exact";
        std::optional<RationalFunction> f;
        // A trunk built with only the phi bound may still close up completely.
        const Trunk full = build_trunk(P, p, E, options(!s_.no_certify));
        if (auto ex = exact_series(full)) {
            f = ex;
        } else {
            f = reconstruct_from_series(P, p, uv, E, method);
        }
        if (!f) {
            throw Error(ErrorCode::unstabilized,
                        uv ? "series is not explained by the candidate denominators; try --pade"
                           : "no certificate found; pass --u/--v or --pade");
        }
        // Every emitted fraction must re-expand to the series it explains.
        if (f->expand(E) != s) throw Error(ErrorCode::verification_mismatch, "fraction does not re-expand to the series");
        print_fraction(*f, p, uv, method, &s);
        return kOk;
    }

    int cmd_reconstruct() {
        const Prime p = prime(s_.p);
        const Polynomial P = polynomial();
        const Trunk T = build_trunk(P, p, 1, options(!s_.no_certify));
        auto uv = candidates(T);
        std::string method;
        auto f = reconstruct_from_series(P, p, uv, s_.truncate, method);
        if (!f) {
            throw Error(ErrorCode::unstabilized,
                        uv ? "series is not explained by the candidate denominators; try --pade"
                           : "no certificate found; pass --u/--v or --pade");
        }
        print_fraction(*f, p, uv, method, nullptr);
        return kOk;
    }

    int cmd_verify() {
        const Prime p = prime(s_.p);
        const Polynomial P = polynomial();
        const std::uint64_t E = *s_.max_e;
        const CountReport rep = count_report(trunk_for(P, p, E, !s_.no_certify), E);
        const std::vector<Integer> brute = brute_force_counts(P, p, E, s_.budget_brute);
        bool ok = true;
        Json rows = Json::array();
        for (std::uint64_t e = 0; e <= E; ++e) {
            const bool agree = rep.counts[e] == brute[e];
            ok = ok && agree;
            if (s_.emit == "json") {
                rows.push_back({{"e", e}, {"trunk", rep.counts[e].get_str()}, {"brute", brute[e].get_str()}, {"agree", agree}});
            } else {
                out_ << "e=" << e << " trunk=" << rep.counts[e].get_str() << " brute=" << brute[e].get_str()
                     << (agree ? " ok" : " MISMATCH") << "\n";
            }
        }
        if (s_.emit == "json") out_ << Json{{"p", p.value()}, {"agree", ok}, {"rows", rows}}.dump(2) << "\n";
        return ok ? kOk : kMismatch;
    }

    static std::vector<PrimePower> parse_factorization(const std::string& text) {
        std::vector<PrimePower> out;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto caret = item.find('^');
            try {
                std::size_t used = 0;
                PrimePower pp;
                const std::string base = item.substr(0, caret);
                pp.prime = std::stoull(base, &used);
                if (used != base.size()) throw std::invalid_argument(item);
                pp.exponent = 1;
                if (caret != std::string::npos) {
                    const std::string ex = item.substr(caret + 1);
                    pp.exponent = std::stoull(ex, &used);
                    if (used != ex.size()) throw std::invalid_argument(item);
                }
                out.push_back(pp);
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::usage, "malformed factor '" + item + "'; expected p^e");
            }
        }
        if (out.empty()) throw Error(ErrorCode::usage, "empty factorization");
        return out;
    }

    int cmd_crt() {
        const Polynomial P = polynomial();
        const auto factors = parse_factorization(s_.modulus);
        for (const auto& f : factors) prime(f.prime);
        BuildOptions o = options(!s_.no_certify);
        const Integer N = count_mod_composite(P, factors, o);
        if (s_.emit == "json") {
            Json fs = Json::array();
            for (const auto& f : factors) fs.push_back({{"p", f.prime}, {"e", f.exponent}});
            out_ << Json{{"factors", fs}, {"N", N.get_str()}}.dump(2) << "\n";
        } else {
            out_ << N.get_str() << "\n";
        }
        return kOk;
    }

    std::ostream& out_;
    std::ostream& err_;
    Settings s_;
};

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return App(out, err).run(args);
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
}

}  // namespace ptrunk::cli
