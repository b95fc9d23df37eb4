#pragma once

/**
 * @file solutions.hpp
 * @brief Counting and enumerating solutions of P = 0 mod p^e from a trunk,
 *        the brute-force oracle, and composite moduli by CRT.
 */

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "ptrunk/poincare.hpp"

namespace ptrunk {

struct CountBreakdown {
    Integer explicit_part = 0;
    Integer hensel_part = 0;
    Integer stalk_part = 0;

    Integer total() const { return explicit_part + hensel_part + stalk_part; }
};

struct CountReport {
    std::uint64_t p = 0;
    std::size_t n = 0;
    std::vector<Integer> counts;  // N_0..N_E
    std::vector<CountBreakdown> breakdown;

    std::uint64_t max_e() const { return counts.empty() ? 0 : counts.size() - 1; }
};

/// N_0..N_E by summing p^{n(e-k)} over window vertices; pruned regions use closed forms.
inline CountReport count_report(const Trunk& T, std::uint64_t E) {
    require_resolved(T, E);
    const Prime& p = T.p();
    const std::size_t n = T.nvars();
    CountReport rep;
    rep.p = p.value();
    rep.n = n;
    rep.counts.assign(E + 1, Integer(0));
    rep.breakdown.assign(E + 1, CountBreakdown{});
    rep.breakdown[0].explicit_part = 1;  // N_0 = 1 by convention

    std::map<std::string, std::pair<StalkCertificate, std::vector<std::pair<std::uint64_t, std::uint64_t>>>> stalks;
    for (const auto& v : T.vertices) {
        if (v.symbolic && v.status == VertexStatus::HenselRoot) {
            // Relative depth j has p^{(n-1)j} vertices of thickness 1 at treetop phi0 + j.
            for (std::uint64_t e = std::max<std::uint64_t>(v.treetop, 1); e <= E; ++e) {
                rep.breakdown[e].hensel_part += ipow(p.z(), n * (e - v.height) - (e - v.treetop));
            }
            continue;
        }
        const std::uint64_t lo = v.treetop - v.thickness + 1;
        for (std::uint64_t e = std::max<std::uint64_t>(lo, 1); e <= std::min<std::uint64_t>(v.treetop, E); ++e) {
            rep.breakdown[e].explicit_part += ipow(p.z(), n * (e - v.height));
        }
        if (v.symbolic && v.status == VertexStatus::StalkEntry) {
            auto& slot = stalks[detail::model_key(*v.certificate, p)];
            slot.first = *v.certificate;
            slot.second.emplace_back(v.height, v.treetop);
        }
    }
    for (const auto& [key, slot] : stalks) {
        if (slot.second.empty()) continue;
        const SeriesTruncation s = model_series(slot.first, p).expand(E);
        for (const auto& [k0, phi0] : slot.second) {
            for (std::uint64_t e = phi0 + 1; e <= E; ++e) {
                // coefficient of T^e in T^{phi0}/p^{n k0} (S0 - 1), times p^{ne}
                const Rational c = s.coeffs[e - phi0] * Rational(ipow(p.z(), n * (e - k0)));
                if (c.get_den() != 1) {
                    throw Error(ErrorCode::verification_mismatch, "model series produced a non-integral count");
                }
                rep.breakdown[e].stalk_part += c.get_num();
            }
        }
    }
    for (std::uint64_t e = 0; e <= E; ++e) rep.counts[e] = rep.breakdown[e].total();
    return rep;
}

inline Integer count_solutions(const Trunk& T, std::uint64_t e) { return count_report(T, e).counts.at(e); }

/// Builds the trunk lazily: height e, expanding only vertices with treetop below e.
inline Integer count_solutions(const Polynomial& P, const Prime& p, std::uint64_t e, BuildOptions opt = {}) {
    if (e == 0) return 1;
    opt.phi_bound = e;
    return count_solutions(build_trunk(P, p, e, opt), e);
}

// ---------------------------------------------------------------------------
// Enumeration

struct Solution {
    Point point;
    Point generator_residue;
    std::uint64_t generator_height = 0;

    friend bool operator==(const Solution&, const Solution&) = default;
};

struct SolutionSet {
    std::uint64_t e = 0;
    std::vector<Solution> points;
};

namespace detail {

inline void emit_fan(const Point& r, std::uint64_t k, std::uint64_t e, const Prime& p, std::vector<Solution>& out) {
    const std::size_t n = r.size();
    const Integer pk = ipow(p.z(), k);
    const Integer span = ipow(p.z(), e - k);
    std::vector<Integer> y(n, Integer(0));
    while (true) {
        Solution s;
        s.point.resize(n);
        for (std::size_t i = 0; i < n; ++i) s.point[i] = r[i] + pk * y[i];
        s.generator_residue = r;
        s.generator_height = k;
        out.push_back(std::move(s));
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++y[i] < span) break;
            y[i] = 0;
            if (i == 0) return;
        }
    }
}

/// Direct descent below a pruned vertex: emit fans in the window, recurse while treetop < e.
inline void descend(const Polynomial& A, const Point& r, std::uint64_t k, std::uint64_t t, std::uint64_t phi,
                    std::uint64_t e, const Prime& p, std::uint64_t root_budget, std::vector<Solution>& out) {
    if (phi >= e && phi - t < e) emit_fan(r, k, e, p, out);
    if (phi >= e) return;
    const Integer pk = ipow(p.z(), k);
    for (const Point& d : roots_mod_p(A, p, root_budget)) {
        auto [tc, Q] = thickness(A, d, p);
        Point rc = r;
        for (std::size_t i = 0; i < rc.size(); ++i) rc[i] += pk * d[i];
        descend(Q, rc, k + 1, tc, phi + tc, e, p, root_budget, out);
    }
}

}  // namespace detail

/// All x in [0, p^e)^n with P(x) = 0 mod p^e, each tagged with its generating trunk vertex.
inline SolutionSet enumerate_solutions(const Trunk& T, std::uint64_t e, std::uint64_t budget,
                                       std::uint64_t root_budget = 1'000'000) {
    const Integer N = count_solutions(T, e);
    if (N > Integer(static_cast<unsigned long>(budget))) {
        throw Error(ErrorCode::budget,
                    "enumeration would emit " + N.get_str() + " points, budget is " + std::to_string(budget));
    }
    const Prime& p = T.p();
    SolutionSet out;
    out.e = e;
    if (e == 0) {
        out.points.push_back({Point(T.nvars(), Integer(0)), Point(T.nvars(), Integer(0)), 0});
        return out;
    }
    for (const auto& v : T.vertices) {
        if (v.symbolic) {
            // Pruned vertex: start the direct descent from the vertex itself.
            detail::descend(v.attached, v.residue, v.height, v.thickness, v.treetop, e, p, root_budget, out.points);
            continue;
        }
        if (v.treetop >= e && v.treetop - v.thickness < e) detail::emit_fan(v.residue, v.height, e, p, out.points);
    }
    std::sort(out.points.begin(), out.points.end(), [](const Solution& a, const Solution& b) {
        if (a.generator_height != b.generator_height) return a.generator_height < b.generator_height;
        if (a.generator_residue != b.generator_residue) return a.generator_residue < b.generator_residue;
        return a.point < b.point;
    });
    if (Integer(static_cast<unsigned long>(out.points.size())) != N) {
        throw Error(ErrorCode::verification_mismatch, "enumeration size " + std::to_string(out.points.size()) +
                                                          " differs from count " + N.get_str());
    }
    return out;
}

/// Re-evaluates every point; throws on the first non-solution.
inline void verify_solutions(const Polynomial& P, const Prime& p, const SolutionSet& s) {
    const Integer mod = ipow(p.z(), s.e);
    for (const auto& sol : s.points) {
        if (sgn(mod_floor(evaluate(P, sol.point), mod)) != 0) {
            throw Error(ErrorCode::verification_mismatch, "enumerated point is not a solution");
        }
    }
}

// ---------------------------------------------------------------------------
// Brute force

namespace detail {

template <class F>
void for_each_tuple(std::size_t n, std::uint64_t modulus, F&& f) {
    std::vector<std::uint64_t> x(n, 0);
    while (true) {
        f(x);
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++x[i] < modulus) break;
            x[i] = 0;
            if (i == 0) return;
        }
    }
}

inline std::uint64_t checked_modulus(const Polynomial& P, const Prime& p, std::uint64_t e, std::uint64_t budget) {
    const Integer total = ipow(p.z(), P.nvars() * e);
    if (total > Integer(static_cast<unsigned long>(budget))) {
        throw Error(ErrorCode::budget, "brute force needs p^(ne) = " + total.get_str() + " evaluations, budget is " +
                                           std::to_string(budget));
    }
    return ipow(p.z(), e).get_ui();
}

}  // namespace detail

/// Exhaustive count over [0, p^e)^n.
inline Integer brute_force_count(const Polynomial& P, const Prime& p, std::uint64_t e,
                                 std::uint64_t budget = 100'000'000) {
    const std::uint64_t m = detail::checked_modulus(P, p, e, budget);
    if (e == 0) return 1;
    ModularEvaluator eval(P, m);
    std::uint64_t count = 0;
    detail::for_each_tuple(P.nvars(), m, [&](const std::vector<std::uint64_t>& x) {
        if (eval(x) == 0) ++count;
    });
    return Integer(static_cast<unsigned long>(count));
}

inline std::vector<Point> brute_force_enumerate(const Polynomial& P, const Prime& p, std::uint64_t e,
                                                std::uint64_t budget = 100'000'000) {
    const std::uint64_t m = detail::checked_modulus(P, p, e, budget);
    std::vector<Point> out;
    if (e == 0) {
        out.emplace_back(P.nvars(), Integer(0));
        return out;
    }
    ModularEvaluator eval(P, m);
    detail::for_each_tuple(P.nvars(), m, [&](const std::vector<std::uint64_t>& x) {
        if (eval(x) != 0) return;
        Point pt(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) pt[i] = static_cast<unsigned long>(x[i]);
        out.push_back(std::move(pt));
    });
    return out;
}

/// N_0..N_E in one pass over [0, p^E)^n: N_e counts residues mod p^e, i.e. tuples with p^e | P(x) divided by p^{n(E-e)}.
inline std::vector<Integer> brute_force_counts(const Polynomial& P, const Prime& p, std::uint64_t E,
                                               std::uint64_t budget = 100'000'000) {
    const std::uint64_t m = detail::checked_modulus(P, p, E, budget);
    std::vector<std::uint64_t> hits(E + 1, 0);
    if (E == 0) return {Integer(1)};
    ModularEvaluator eval(P, m);
    detail::for_each_tuple(P.nvars(), m, [&](const std::vector<std::uint64_t>& x) {
        std::uint64_t r = eval(x);
        std::uint64_t v = 0;
        if (r == 0) {
            v = E;
        } else {
            while (r % p.value() == 0) {
                r /= p.value();
                ++v;
            }
        }
        ++hits[std::min(v, E)];
    });
    std::vector<Integer> out(E + 1);
    for (std::uint64_t e = 0; e <= E; ++e) {
        std::uint64_t atleast = 0;
        for (std::uint64_t j = e; j <= E; ++j) atleast += hits[j];
        out[e] = Integer(static_cast<unsigned long>(atleast)) / ipow(p.z(), P.nvars() * (E - e));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Composite moduli

struct PrimePower {
    std::uint64_t prime = 0;
    std::uint64_t exponent = 0;
};

/// Product of per-prime counts; the factorization is supplied by the caller.
inline Integer count_mod_composite(const Polynomial& P, const std::vector<PrimePower>& factors,
                                   const BuildOptions& opt = {}) {
    std::set<std::uint64_t> seen;
    Integer total = 1;
    for (const auto& f : factors) {
        if (!seen.insert(f.prime).second) {
            throw Error(ErrorCode::domain, "prime " + std::to_string(f.prime) + " repeated in the factorization");
        }
        const Prime p(f.prime);
        total *= count_solutions(P, p, f.exponent, opt);
    }
    return total;
}

}  // namespace ptrunk
