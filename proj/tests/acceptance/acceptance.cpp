// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "appendix.hpp"
#include "checks.hpp"

using namespace ptrunk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (ok) detail << why;
        ok = false;
    }
};

BuildOptions with_certify(bool on) {
    BuildOptions o;
    o.certify_stalks = on;
    return o;
}

Polynomial monomial_model(unsigned u, unsigned v, std::uint64_t alpha, const Prime& p, long v0 = -1) {
    return Polynomial::variable(2, 0).pow(u) + (ipow(p.z(), alpha) * v0) * Polynomial::variable(2, 1).pow(v);
}

// 1. Count table for x^2 - y^3 at p = 5.
void criterion1(Outcome& o) {
    const auto t0 = Clock::now();
    const Polynomial P = parse_polynomial("x^2 - y^3");
    const Prime p(5);
    const std::vector<std::pair<std::uint64_t, const char*>> table = {
        {1, "5"}, {2, "45"}, {3, "225"}, {4, "1125"}, {5, "5625"}, {6, "90625"}, {7, "453125"}, {10, "95703125"}};
    for (bool cert : {true, false}) {
        for (const auto& [e, want] : table) {
            const Integer got = count_solutions(P, p, e, with_certify(cert));
            if (got != Integer(want)) {
                o.fail("N_" + std::to_string(e) + " = " + got.get_str() + (cert ? " (certified)" : " (explicit)"));
            }
        }
    }
    const double dt = seconds_since(t0);
    if (dt >= 10) o.fail("took " + std::to_string(dt) + " s");
    o.detail << "N_1..N_7, N_10 exact, certified and explicit, " << dt << " s";
}

// 2. Closed form for p in {2,3,5,7}, from the model series and by reconstruction.
void criterion2(Outcome& o) {
    const Polynomial P = parse_polynomial("x^2 - y^3");
    for (std::uint64_t pv : {2u, 3u, 5u, 7u}) {
        const Prime p(pv);
        const RationalFunction want = appendix::as_function(appendix::closed_form(p));
        auto c = certify_model_stalk(P, p);
        if (!c.certificate) {
            o.fail("no certificate at p=" + std::to_string(pv));
            continue;
        }
        if (model_series(*c.certificate, p) != want) o.fail("model series differs at p=" + std::to_string(pv));
        const std::uint64_t E = candidate_denominator(2, 3, p).degree() + 12;
        BuildOptions opt;
        opt.phi_bound = E;
        const SeriesTruncation s = truncated_series(build_trunk(P, p, E + 1, opt), E);
        auto f = reconstruct_rational(s, 2, 3, p);
        if (!f || *f != want) o.fail("reconstruction differs at p=" + std::to_string(pv));
        if (f && f->expand(E) != s) o.fail("reconstruction does not re-expand at p=" + std::to_string(pv));
    }
    o.detail << "(p^6+(p^4-p^3)T^2-T^6)/((p-T)(p^5-T^6)) for p=2,3,5,7 via model series and via reconstruction";
}

// 3. Component series against region sums of the explicit trunk.
void criterion3(Outcome& o) {
    for (std::uint64_t pv : {3u, 5u}) {
        const Prime p(pv);
        const auto regions = appendix::region_sums(p, 20);
        const auto printed = appendix::printed(p);
        RationalFunction total;
        for (int r = 0; r < appendix::kRegions; ++r) {
            const RationalFunction f = appendix::as_function(printed[r]);
            if (f.expand(20).coeffs != regions.sums[r]) {
                o.fail(std::string("S_") + appendix::kRegionName[r] + " at p=" + std::to_string(pv));
            }
            total += f;
        }
        if (total != appendix::as_function(appendix::closed_form(p))) o.fail("sum differs at p=" + std::to_string(pv));
    }
    o.detail << "S_A..S_F match region sums to order 20 for p=3,5; total equals the closed form";
}

// 4. Trunk counts and enumerations vs brute force.
void criterion4(Outcome& o, const std::vector<Polynomial>& corpus) {
    const auto t0 = Clock::now();
    std::size_t cases = 0;
    for (const auto& P : corpus) {
        for (std::uint64_t pv : {2u, 3u, 5u}) {
            const Prime p(pv);
            const auto bf = brute_force_counts(P, p, 4);
            for (bool cert : {true, false}) {
                const Trunk T = build_trunk(P, p, 4, with_certify(cert));
                const CountReport r = count_report(T, 4);
                for (std::uint64_t e = 0; e <= 4; ++e) {
                    ++cases;
                    if (r.counts[e] != bf[e]) {
                        o.fail(to_string(P) + " p=" + std::to_string(pv) + " e=" + std::to_string(e) + ": " +
                               r.counts[e].get_str() + " vs " + bf[e].get_str());
                    }
                }
                if (!cert) continue;
                for (std::uint64_t e = 1; e <= 4; ++e) {
                    const SolutionSet S = enumerate_solutions(T, e, 100'000'000);
                    std::set<Point> got;
                    for (const auto& s : S.points) got.insert(s.point);
                    const auto want = brute_force_enumerate(P, p, e);
                    if (got.size() != S.points.size() || got != std::set<Point>(want.begin(), want.end())) {
                        o.fail("enumeration of " + to_string(P) + " p=" + std::to_string(pv) + " e=" +
                               std::to_string(e));
                    }
                }
            }
        }
    }
    const double dt = seconds_since(t0);
    if (dt > 300) o.fail("took " + std::to_string(dt) + " s");
    o.detail << corpus.size() << " polynomials, p=2,3,5, e<=4, " << cases << " counts plus enumerations, " << dt
             << " s";
}

// 5. c_e = N_e / p^{ne} for E <= 12.
void criterion5(Outcome& o, const std::vector<Polynomial>& corpus) {
    std::size_t trunks = 0;
    for (const auto& P : corpus) {
        for (std::uint64_t pv : {2u, 3u, 5u}) {
            const Prime p(pv);
            for (bool cert : {true, false}) {
                BuildOptions opt = with_certify(cert);
                opt.phi_bound = 12;
                const Trunk T = build_trunk(P, p, 12, opt);
                const std::uint64_t E = std::min<std::uint64_t>(12, T.resolved_level().is_finite()
                                                                        ? T.resolved_level().value()
                                                                        : 12);
                const SeriesTruncation s = truncated_series(T, E);
                const CountReport r = count_report(T, E);
                ++trunks;
                for (std::uint64_t e = 0; e <= E; ++e) {
                    if (s.coeffs[e] != ratio(r.counts[e], ipow(p.z(), P.nvars() * e))) {
                        o.fail(to_string(P) + " p=" + std::to_string(pv) + " e=" + std::to_string(e));
                    }
                }
                if (E < 12) o.fail(to_string(P) + " resolved only to " + std::to_string(E));
            }
        }
    }
    o.detail << trunks << " trunks, E=12, certified and explicit";
}

// 6. Structural lemmas.
void criterion6(Outcome& o, const std::vector<Polynomial>& corpus) {
    std::mt19937_64 rng(606);
    checks::Tally all;
    for (const auto& P : corpus) {
        for (std::uint64_t pv : {2u, 3u, 5u}) {
            const Prime p(pv);
            const Trunk T = build_trunk(P, p, 4);
            all.merge(checks::trunk_invariants(P, T, rng));
            all.merge(checks::hensel_regularity(T));
            all.merge(checks::translation_invariance(P, p, 3, rng));
            all.merge(checks::certified_soundness(build_trunk(P, p, 3, with_certify(true)), 4));
            // multiplicity / residual degree chain
            if (content_val(P, p) != Valuation(0)) continue;
            for (const Point& r0 : roots_mod_p(P, p)) {
                auto [t, S] = thickness(P, r0, p);
                const unsigned s = residual_degree(P, r0, p);
                all.expect(multiplicity_mod_p(P, r0, p) >= t && t >= s, "chain at first step of " + to_string(P));
                all.expect(t <= P.total_degree(), "t > deg for " + to_string(P));
                for (const Point& r1 : roots_mod_p(S, p)) {
                    const unsigned m1 = multiplicity_mod_p(S, r1, p);
                    all.expect(s >= m1 && m1 >= thickness(S, r1, p).t, "chain at second step of " + to_string(P));
                }
            }
        }
    }
    if (all.violations) o.fail(std::to_string(all.violations) + " violations, first: " + all.log.front());
    o.detail << all.checked << " checks over " << corpus.size() << " polynomials, p=2,3,5";
}

// 7. Binomial valuation lemma.
void criterion7(Outcome& o) {
    std::size_t checked = 0, bad = 0;
    auto expect = [&](bool ok) {
        ++checked;
        bad += !ok;
    };
    for (std::uint64_t pv : {2u, 3u, 5u, 7u}) {
        const Prime p(pv);
        for (std::uint64_t k = 1; k <= 60; ++k) expect(oracle::naive_val(oracle::naive_factorial(k), pv) <= k - 1);
        for (std::uint64_t n = 1; n <= 60; ++n) {
            const long vn = static_cast<long>(oracle::naive_val(Integer(static_cast<unsigned long>(n)), pv));
            for (std::uint64_t k = 1; k <= n; ++k) {
                const Integer b = binomial(n, k);
                expect(static_cast<long>(oracle::naive_val(b, pv)) >= vn + 1 - static_cast<long>(k));
                expect(static_cast<long>(val_p_binomial(n, k, p)) >= vn + 1 - static_cast<long>(k));
                if (k >= 2) {
                    expect(static_cast<long>(oracle::naive_val(b * static_cast<unsigned long>(k), pv)) >=
                           vn + 2 - static_cast<long>(k));
                }
            }
        }
        // item 4: C_k of (s + p^l x)^n
        for (std::uint64_t l = 1; l <= 4; ++l) {
            for (unsigned n = 1; n <= 30; ++n) {
                for (long s : {1L, 2L, -1L, 4L, 6L, 11L}) {
                    if (s % static_cast<long>(pv) == 0) continue;
                    const Polynomial lin = Polynomial::constant(1, s) + ipow(p.z(), l) * Polynomial::variable(1, 0);
                    const Polynomial pw = lin.pow(n);
                    const Integer c1 = pw.coefficient(Monomial({1}));
                    for (unsigned k = 1; k <= n; ++k) {
                        expect(val_p(pw.coefficient(Monomial({k})), p) >= val_p(c1, p));
                    }
                }
            }
        }
    }
    if (bad) o.fail(std::to_string(bad) + " violations");
    o.detail << checked << " checks, p=2,3,5,7";
}

// 8. Closed-form generators vs direct xylon summation to order 15.
void criterion8(Outcome& o) {
    const std::uint64_t E = 15;
    std::size_t cases = 0;
    for (std::uint64_t pv : {3u, 5u}) {
        const Prime p(pv);
        const std::string tag = " p=" + std::to_string(pv);
        // Hensel trees: P = x in one and two variables
        for (const char* s : {"x", "x + 0*y"}) {
            const Polynomial P = parse_polynomial(s);
            ++cases;
            if (hensel_series(0, 0, p, P.nvars()).expand(E).coeffs !=
                oracle::xylon_sum(P, p, E, oracle::HenselMode::Explicit)) {
                o.fail("hensel_series n=" + std::to_string(P.nvars()) + tag);
            }
        }
        // Shifted Hensel trees: the p-1 branches off the root of x^2 - y^3
        {
            ++cases;
            const auto regions = appendix::region_sums(p, E);
            const auto f = RationalFunction(QPoly(Rational(p.z() - 1))) * hensel_series(1, 1, p, 2);
            if (f.expand(E).coeffs != regions.sums[appendix::B]) o.fail("shifted hensel_series" + tag);
        }
        // Stalks: binary forms whose only root mod p is the origin
        const std::vector<std::pair<const char*, unsigned>> forms =
            pv == 3 ? std::vector<std::pair<const char*, unsigned>>{{"x^2 - 2*y^2", 2}, {"x^3 - x*y^2 + y^3", 3}}
                    : std::vector<std::pair<const char*, unsigned>>{{"x^2 - 2*y^2", 2}, {"x^3 + x*y^2 + y^3", 3}};
        for (const auto& [s, u] : forms) {
            const Polynomial F = parse_polynomial(s);
            ++cases;
            if (roots_mod_p(F, p) != std::vector<Point>{Point(2, Integer(0))}) o.fail(std::string(s) + " has extra roots");
            if (stalk_series(u, p, 2).expand(E).coeffs != oracle::xylon_sum(F, p, E, oracle::HenselMode::Explicit)) {
                o.fail(std::string("stalk_series ") + s + tag);
            }
        }
        // Model series
        for (auto [u, v] : std::vector<std::pair<unsigned, unsigned>>{{2, 2}, {2, 3}, {2, 5}, {3, 4}}) {
            for (std::uint64_t alpha = 0; alpha <= 3; ++alpha) {
                for (long v0 : {-1L, 2L}) {
                    const Polynomial Q = monomial_model(u, v, alpha, p, v0);
                    auto c = certify_model_stalk(Q, p);
                    ++cases;
                    if (!c.certificate) {
                        o.fail("no certificate for " + to_string(Q) + tag);
                        continue;
                    }
                    if (model_series(*c.certificate, p).expand(E).coeffs !=
                        oracle::xylon_sum(Q, p, E, oracle::HenselMode::Closed)) {
                        o.fail("model_series " + to_string(Q) + tag);
                    }
                }
            }
        }
    }
    o.detail << cases << " generator/expansion comparisons to order 15, p=3,5";
}

}  // namespace

int main() {
    const std::vector<Polynomial> corpus = oracle::corpus(200);
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"appendix count table", criterion1},
        {"appendix closed form", criterion2},
        {"appendix component series", criterion3},
        {"oracle equivalence", [&](Outcome& o) { criterion4(o, corpus); }},
        {"counting/series consistency", [&](Outcome& o) { criterion5(o, corpus); }},
        {"structural lemmas", [&](Outcome& o) { criterion6(o, corpus); }},
        {"binomial valuation lemma", criterion7},
        {"closed forms vs expansion", criterion8},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " -- "
                  << o.detail.str() << std::endl;
        failures += !o.ok;
    }
    return failures == 0 ? 0 : 1;
}
