#pragma once

/**
 * @file poincare.hpp
 * @brief Poincaré series: per-vertex xylon terms, closed forms for Hensel
 *        trees, constant-thickness stalks and certified models, truncation
 *        from a trunk, and exact rational reconstruction.
 */

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ptrunk/series.hpp"
#include "ptrunk/trunk.hpp"

namespace ptrunk {

namespace detail {

inline Rational inv_ppow(const Prime& p, std::uint64_t e) { return Rational(Integer(1), ipow(p.z(), e)); }

/// c T^k / p^e
inline QPoly scaled_monomial(const Rational& c, std::uint64_t k, const Prime& p, std::uint64_t e) {
    return QPoly::monomial(c * inv_ppow(p, e), k);
}

}  // namespace detail

/// Xylon term of one vertex. The root gives 1 + T + ... + T^{t0}.
inline QPoly xylon_term(const TrunkVertex& v, const Prime& p, std::size_t n) {
    if (v.is_root()) {
        return QPoly::ones(v.thickness + 1);
    }
    if (v.thickness == 0) throw Error(ErrorCode::precondition, "non-root trunk vertex with zero thickness");
    QPoly shift = detail::scaled_monomial(Rational(1), v.treetop - v.thickness + 1, p, n * v.height);
    return shift * QPoly::ones(v.thickness);
}

/// Series of a Hensel tree rooted at height k0 with treetop phi0 (root vertex included).
inline RationalFunction hensel_series(std::uint64_t k0, std::uint64_t phi0, const Prime& p, std::size_t n) {
    return RationalFunction(detail::scaled_monomial(Rational(1), phi0, p, n * k0)) *
           RationalFunction::geometric(detail::inv_ppow(p, 1), 1);
}

/// 1 + (1 + ... + T^{u-1}) (T/p^n) / (1 - T^u/p^n): an infinite stalk of constant thickness u.
inline RationalFunction stalk_series(unsigned u, const Prime& p, std::size_t n) {
    if (u == 0) throw Error(ErrorCode::domain, "stalk thickness must be positive");
    QPoly lead = QPoly::ones(u) * detail::scaled_monomial(Rational(1), 1, p, n);
    return RationalFunction(QPoly(Rational(1))) +
           RationalFunction(lead) * RationalFunction::geometric(detail::inv_ppow(p, n), u);
}

/// The four candidate factors p - T, p^2 - T^u, p^{2u} - T^{u^2}, p^{u+v} - T^{uv}.
inline std::vector<QPoly> candidate_factors(unsigned u, unsigned v, const Prime& p) {
    auto f = [&](std::uint64_t pe, std::uint64_t te) {
        return QPoly(Rational(ipow(p.z(), pe))) - QPoly::monomial(Rational(1), te);
    };
    return {f(1, 1), f(2, u), f(2ull * u, std::uint64_t(u) * u), f(u + v, std::uint64_t(u) * v)};
}

inline QPoly candidate_denominator(unsigned u, unsigned v, const Prime& p) {
    QPoly D(Rational(1));
    for (const auto& f : candidate_factors(u, v, p)) D = D * f;
    return D;
}

struct RegionOptions {
    std::uint64_t height_cap = 64;
    std::uint64_t vertex_budget = 1'000'000;
    bool skip_origin = false;
};

/// Series of all non-root vertices of the Hensel-pruned trunk of P, which must be finite.
inline RationalFunction finite_region_series(const Polynomial& P, const Prime& p, const RegionOptions& ro = {}) {
    BuildOptions opt;
    opt.vertex_budget = ro.vertex_budget;
    if (ro.skip_origin) opt.skip_root_digit = Point(P.nvars(), Integer(0));
    Trunk T = build_trunk(P, p, ro.height_cap, opt);
    if (T.truncated) throw Error(ErrorCode::budget, "finite region exceeded the vertex budget");
    if (T.resolved_level().is_finite()) {
        throw Error(ErrorCode::unstabilized, "region of " + to_string(P) + " is not finite below height " +
                                                 std::to_string(ro.height_cap));
    }
    const std::size_t n = P.nvars();
    QPoly explicit_part;
    QPoly hensel_heads;
    for (const auto& v : T.vertices) {
        if (v.is_root()) continue;
        if (v.symbolic) {
            hensel_heads += detail::scaled_monomial(Rational(1), v.treetop, p, n * v.height);
        } else {
            explicit_part += xylon_term(v, p, n);
        }
    }
    return RationalFunction(explicit_part) +
           RationalFunction(hensel_heads) * RationalFunction::geometric(detail::inv_ppow(p, 1), 1);
}

// ---------------------------------------------------------------------------
// Certified model series

namespace detail {

inline std::string model_key(const StalkCertificate& c, const Prime& p) {
    return std::to_string(p.value()) + "|" + std::to_string(c.u) + "|" + std::to_string(c.v) + "|" +
           std::to_string(c.alpha) + "|" + c.u0.get_str() + "|" + c.v0.get_str();
}

inline std::mutex& model_cache_mutex() {
    static std::mutex m;
    return m;
}

inline std::map<std::string, RationalFunction>& model_cache() {
    static std::map<std::string, RationalFunction> cache;
    return cache;
}

inline RationalFunction t_over_p(std::uint64_t texp, const Prime& p, std::uint64_t pexp) {
    return RationalFunction(scaled_monomial(Rational(1), texp, p, pexp));
}

inline RationalFunction compute_model_series(const StalkCertificate& c, const Prime& p) {
    const unsigned u = c.u, v = c.v;
    if (u < 2 || v < u) throw Error(ErrorCode::precondition, "model requires 1 < u <= v");
    if (mod_u64(c.u0, p.value()) == 0 || mod_u64(c.v0, p.value()) == 0) {
        throw Error(ErrorCode::precondition, "model coefficients must be units mod p");
    }
    const RationalFunction SA = stalk_series(u, p, 2);
    RegionOptions starred;
    starred.skip_origin = true;

    if (v == u) {
        // Every starred trunk is the same up to the shift T^{ku}/p^{2k}.
        RationalFunction H = finite_region_series(model_polynomial(c, p), p, starred);
        return SA + H * RationalFunction::geometric(inv_ppow(p, 2), u);
    }

    const std::uint64_t d = v - u;
    const std::uint64_t g = val_p(Integer(u), p).value() + 2;
    auto alpha_at = [&](std::uint64_t k) { return c.alpha + k * d; };
    auto settled = [&](std::uint64_t k) {
        const std::uint64_t a = alpha_at(k);
        return a > 0 && (a % u != 0 || a / u >= g);
    };
    std::uint64_t K = 0;
    for (std::uint64_t k = 0; alpha_at(k) < g * u; ++k) {
        if (!settled(k)) K = k + 1;
    }

    RationalFunction total = SA;
    for (std::uint64_t k = 0; k < K; ++k) {
        RationalFunction H = finite_region_series(model_polynomial(c, p, alpha_at(k)), p, starred);
        total += t_over_p(k * u, p, 2 * k) * H;
    }

    const Rational pm1(Integer(static_cast<unsigned long>(p.value() - 1)));
    const RationalFunction oneY = RationalFunction::geometric(inv_ppow(p, 1), u);         // 1/(1 - T^u/p)
    const RationalFunction oneX = RationalFunction::geometric(inv_ppow(p, 2 * u), u * u);  // 1/(1 - T^{u^2}/p^{2u})
    const RationalFunction oneW = RationalFunction::geometric(inv_ppow(p, u + v), u * v);  // 1/(1 - T^{uv}/p^{u+v})

    std::optional<RationalFunction> tail_sum;
    for (std::uint64_t k0 = K; k0 < K + u; ++k0) {
        const std::uint64_t a = alpha_at(k0);
        const std::uint64_t q0 = a / u;
        const std::uint64_t r = a % u;

        RationalFunction head(QPoly::ones(u) * scaled_monomial(pm1, k0 * u + 1, p, 2 * k0 + 2));
        RationalFunction cascade = head * oneY * (oneX - t_over_p(u * q0, p, q0) * oneW);
        total += cascade;

        if (r != 0) {
            RationalFunction term(QPoly::ones(r) * scaled_monomial(pm1, (k0 + q0) * u + 1, p, 2 * k0 + q0 + 2));
            total += term * oneW;
        } else {
            if (!tail_sum) {
                // Tails depend only on the first g digits of the branch prefix.
                RationalFunction R;
                const Integer pg = ipow(p.z(), g);
                const Polynomial X = Polynomial::variable(2, 0);
                const Polynomial Y = Polynomial::variable(2, 1);
                for (Integer dd = 1; dd < pg; ++dd) {
                    if (mod_u64(dd, p.value()) == 0) continue;
                    Polynomial F = c.u0 * X.pow(u) + c.v0 * (Polynomial::constant(2, dd) + pg * Y).pow(v);
                    R += finite_region_series(F, p);
                }
                tail_sum = R;
            }
            total += t_over_p((k0 + q0) * u, p, 2 * k0 + q0 + g) * *tail_sum * oneW;
        }
    }
    return total;
}

}  // namespace detail

/// Poincaré series of the model u0 x^u + p^alpha v0 y^v, normalised with the entry as root.
inline RationalFunction model_series(const StalkCertificate& c, const Prime& p) {
    const std::string key = detail::model_key(c, p);
    {
        std::lock_guard<std::mutex> lock(detail::model_cache_mutex());
        auto it = detail::model_cache().find(key);
        if (it != detail::model_cache().end()) return it->second;
    }
    RationalFunction f = detail::compute_model_series(c, p);
    std::lock_guard<std::mutex> lock(detail::model_cache_mutex());
    detail::model_cache().emplace(key, f);
    return f;
}

// ---------------------------------------------------------------------------
// Series of a trunk

/// Closed-form series of a pruned vertex and everything above it.
inline RationalFunction symbolic_series(const TrunkVertex& v, const Prime& p, std::size_t n) {
    if (v.status == VertexStatus::HenselRoot) return hensel_series(v.height, v.treetop, p, n);
    if (v.status == VertexStatus::StalkEntry && v.certificate) {
        RationalFunction above = model_series(*v.certificate, p) - RationalFunction(QPoly(Rational(1)));
        return RationalFunction(xylon_term(v, p, n)) +
               RationalFunction(detail::scaled_monomial(Rational(1), v.treetop, p, n * v.height)) * above;
    }
    throw Error(ErrorCode::precondition, "vertex is not pruned");
}

inline void require_resolved(const Trunk& T, std::uint64_t E) {
    const Valuation lvl = T.resolved_level();
    if (lvl.is_finite() && E > lvl.value()) {
        throw Error(T.truncated ? ErrorCode::budget : ErrorCode::insufficient_depth,
                    "trunk resolves counts only up to e = " + std::to_string(lvl.value()) + ", requested " +
                        std::to_string(E) + (T.truncated ? " (vertex budget exhausted)" : ""));
    }
}

/// c_0..c_E from xylon terms of explicit vertices plus closed forms of pruned regions.
inline SeriesTruncation truncated_series(const Trunk& T, std::uint64_t E) {
    require_resolved(T, E);
    const Prime& p = T.p();
    const std::size_t n = T.nvars();
    std::vector<Rational> c(E + 1);
    std::vector<Rational> hensel_heads(E + 1);
    std::map<std::string, std::pair<StalkCertificate, std::vector<Rational>>> stalk_heads;

    for (const auto& v : T.vertices) {
        if (v.symbolic && v.status == VertexStatus::HenselRoot) {
            if (v.treetop <= E) hensel_heads[v.treetop] += detail::inv_ppow(p, n * v.height);
            continue;
        }
        const QPoly x = xylon_term(v, p, n);
        for (std::size_t i = 0; i < x.coeffs().size() && i <= E; ++i) c[i] += x.coeffs()[i];
        if (v.symbolic && v.status == VertexStatus::StalkEntry) {
            auto& slot = stalk_heads[detail::model_key(*v.certificate, p)];
            if (slot.second.empty()) {
                slot.first = *v.certificate;
                slot.second.resize(E + 1);
            }
            if (v.treetop <= E) slot.second[v.treetop] += detail::inv_ppow(p, n * v.height);
        }
    }
    auto convolve = [&](const std::vector<Rational>& heads, const SeriesTruncation& s, std::size_t from) {
        for (std::size_t i = 0; i <= E; ++i) {
            if (sgn(heads[i]) == 0) continue;
            for (std::size_t j = from; i + j <= E; ++j) c[i + j] += heads[i] * s.coeffs[j];
        }
    };
    convolve(hensel_heads, RationalFunction::geometric(detail::inv_ppow(p, 1), 1).expand(E), 0);
    for (const auto& [key, slot] : stalk_heads) convolve(slot.second, model_series(slot.first, p).expand(E), 1);
    return {std::move(c)};
}

/// Exact S(T) when the trunk has no unresolved frontier.
inline std::optional<RationalFunction> exact_series(const Trunk& T) {
    if (T.resolved_level().is_finite()) return std::nullopt;
    const Prime& p = T.p();
    const std::size_t n = T.nvars();
    QPoly explicit_part;
    QPoly hensel_heads;
    RationalFunction stalks;
    for (const auto& v : T.vertices) {
        if (v.symbolic && v.status == VertexStatus::HenselRoot) {
            hensel_heads += detail::scaled_monomial(Rational(1), v.treetop, p, n * v.height);
        } else if (v.symbolic) {
            stalks += symbolic_series(v, p, n);
        } else {
            explicit_part += xylon_term(v, p, n);
        }
    }
    return RationalFunction(explicit_part) + stalks +
           RationalFunction(hensel_heads) * RationalFunction::geometric(detail::inv_ppow(p, 1), 1);
}

// ---------------------------------------------------------------------------
// Reconstruction

/// Numerator against the fixed candidate denominator; the top `guard` coefficients of s*D must vanish.
inline std::optional<RationalFunction> reconstruct_rational(const SeriesTruncation& s, unsigned u, unsigned v,
                                                            const Prime& p, std::size_t guard = 10) {
    if (u == 0 || v == 0) throw Error(ErrorCode::domain, "u and v must be positive");
    const QPoly D = candidate_denominator(u, v, p);
    const std::size_t E = s.order();
    const std::size_t need = static_cast<std::size_t>(D.degree()) + guard;
    if (s.coeffs.empty() || E < need) {
        throw Error(ErrorCode::insufficient_depth,
                    "reconstruction needs the series to order " + std::to_string(need) + ", got " + std::to_string(E));
    }
    std::vector<Rational> prod(E + 1);
    for (std::size_t i = 0; i <= E; ++i) {
        for (std::size_t j = 0; j <= i && j < D.coeffs().size(); ++j) prod[i] += D.coeffs()[j] * s.coeffs[i - j];
    }
    const std::size_t bound = E - guard;
    for (std::size_t i = bound + 1; i <= E; ++i) {
        if (sgn(prod[i]) != 0) return std::nullopt;
    }
    prod.resize(bound + 1);
    RationalFunction f(QPoly(std::move(prod)), D);
    if (f.expand(E) != s) return std::nullopt;
    return f;
}

namespace detail {

/// Solve A x = b over Q; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && sgn(A[piv][col]) == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || sgn(A[r][col]) == 0) continue;
            Rational f = A[r][col] / A[col][col];
            for (std::size_t k = col; k < n; ++k) A[r][k] -= f * A[col][k];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= A[i][i];
    return b;
}

}  // namespace detail

/// Generic Padé fallback: smallest L+M with a [L/M] approximant that also explains `guard` extra coefficients.
inline std::optional<RationalFunction> pade_reconstruct(const SeriesTruncation& s, std::size_t guard = 10) {
    const std::size_t E = s.order();
    if (s.coeffs.empty() || E < guard) return std::nullopt;
    const std::size_t budget = E - guard;
    auto at = [&](long i) { return i < 0 ? Rational(0) : s.coeffs[static_cast<std::size_t>(i)]; };
    for (std::size_t total = 0; total <= budget; ++total) {
        for (std::size_t M = 0; M <= total; ++M) {
            const std::size_t L = total - M;
            // sum_{j=0..M} q_j s_{i-j} = 0 for i = L+1..L+M, q_0 = 1
            std::vector<std::vector<Rational>> A(M, std::vector<Rational>(M));
            std::vector<Rational> b(M);
            for (std::size_t r = 0; r < M; ++r) {
                const long i = static_cast<long>(L + 1 + r);
                for (std::size_t j = 1; j <= M; ++j) A[r][j - 1] = at(i - static_cast<long>(j));
                b[r] = -at(i);
            }
            auto q = detail::solve_exact(A, b);
            if (!q) continue;
            std::vector<Rational> den(M + 1);
            den[0] = 1;
            for (std::size_t j = 1; j <= M; ++j) den[j] = (*q)[j - 1];
            std::vector<Rational> num(L + 1);
            bool ok = true;
            for (std::size_t i = 0; i <= E && ok; ++i) {
                Rational acc = 0;
                for (std::size_t j = 0; j <= M && j <= i; ++j) acc += den[j] * s.coeffs[i - j];
                if (i <= L) {
                    num[i] = acc;
                } else if (sgn(acc) != 0) {
                    ok = false;
                }
            }
            if (!ok) continue;
            RationalFunction f(QPoly(std::move(num)), QPoly(std::move(den)));
            if (f.expand(E) == s) return f;
        }
    }
    return std::nullopt;
}

}  // namespace ptrunk
