#pragma once

/**
 * @file polynomial.hpp
 * @brief Sparse multivariate polynomials over the integers, together with the
 *        substitutions that drive trunk construction.
 *
 * A polynomial stores its terms in an ordered map from exponent vector to a
 * nonzero coefficient, so equality of term maps is equality of polynomials.
 * Variable indices are 0-based in this API.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptrunk/arith.hpp"

namespace ptrunk {

/// Exponent vector with its total degree cached.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<unsigned> exps)
        : exps_(std::move(exps)), degree_(std::accumulate(exps_.begin(), exps_.end(), 0u)) {}

    static Monomial one(std::size_t n) { return Monomial(std::vector<unsigned>(n, 0)); }

    std::size_t size() const noexcept { return exps_.size(); }
    unsigned operator[](std::size_t i) const { return exps_[i]; }
    unsigned degree() const noexcept { return degree_; }
    std::span<const unsigned> exponents() const noexcept { return exps_; }

    Monomial with(std::size_t i, unsigned e) const {
        auto copy = exps_;
        copy[i] = e;
        return Monomial(std::move(copy));
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        std::vector<unsigned> e(a.exps_.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.exps_[i] + b.exps_[i];
        return Monomial(std::move(e));
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }
    friend auto operator<=>(const Monomial& a, const Monomial& b) { return a.exps_ <=> b.exps_; }

private:
    std::vector<unsigned> exps_;
    unsigned degree_ = 0;
};

using Point = std::vector<Integer>;

class Polynomial {
public:
    using TermMap = std::map<Monomial, Integer>;

    explicit Polynomial(std::size_t n = 1) : n_(n) {
        if (n == 0) throw Error(ErrorCode::domain, "a polynomial needs at least one variable");
    }

    static Polynomial constant(std::size_t n, const Integer& c) {
        Polynomial out(n);
        out.add_term(Monomial::one(n), c);
        return out;
    }

    static Polynomial variable(std::size_t n, std::size_t i) {
        if (i >= n) throw Error(ErrorCode::dimension_mismatch, "variable index out of range");
        Polynomial out(n);
        out.add_term(Monomial::one(n).with(i, 1), Integer(1));
        return out;
    }

    /// Build from (exponents, coefficient) pairs; repeated exponents are summed.
    static Polynomial from_terms(std::size_t n, std::initializer_list<std::pair<std::vector<unsigned>, long>> terms) {
        Polynomial out(n);
        for (const auto& [e, c] : terms) {
            if (e.size() != n) throw Error(ErrorCode::dimension_mismatch, "exponent vector length differs from n");
            out.add_term(Monomial(e), Integer(c));
        }
        return out;
    }

    std::size_t nvars() const noexcept { return n_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t term_count() const noexcept { return terms_.size(); }

    unsigned total_degree() const {
        unsigned d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }

    Integer coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Integer(0) : it->second;
    }

    Integer constant_term() const { return coefficient(Monomial::one(n_)); }

    void add_term(const Monomial& m, const Integer& c) {
        if (m.size() != n_) throw Error(ErrorCode::dimension_mismatch, "monomial length differs from n");
        if (sgn(c) == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_same_n(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_same_n(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial out(a.n_);
        for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, -c);
        return out;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_same_n(b);
        Polynomial out(a.n_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
        return out;
    }
    friend Polynomial operator*(const Integer& s, const Polynomial& a) {
        Polynomial out(a.n_);
        if (sgn(s) == 0) return out;
        for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, s * c);
        return out;
    }

    Polynomial pow(unsigned e) const {
        Polynomial result = constant(n_, Integer(1));
        Polynomial base = *this;
        while (e > 0) {
            if (e & 1u) result = result * base;
            e >>= 1u;
            if (e > 0) base = base * base;
        }
        return result;
    }

    /// Coefficient-wise exact division; throws if some coefficient is not divisible.
    Polynomial divide_exact(const Integer& d) const {
        Polynomial out(n_);
        for (const auto& [m, c] : terms_) {
            if (!mpz_divisible_p(c.get_mpz_t(), d.get_mpz_t())) {
                throw Error(ErrorCode::domain, "coefficient not divisible in exact division");
            }
            Integer q;
            mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
            out.terms_.emplace(m, std::move(q));
        }
        return out;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

private:
    void check_same_n(const Polynomial& o) const {
        if (o.n_ != n_) throw Error(ErrorCode::dimension_mismatch, "polynomials have different variable counts");
    }

    std::size_t n_;
    TermMap terms_;
};

inline Integer evaluate(const Polynomial& P, std::span<const Integer> x) {
    if (x.size() != P.nvars()) throw Error(ErrorCode::dimension_mismatch, "point dimension differs from n");
    Integer total = 0;
    Integer term;
    Integer pw;
    for (const auto& [m, c] : P.terms()) {
        term = c;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            mpz_pow_ui(pw.get_mpz_t(), x[i].get_mpz_t(), m[i]);
            term *= pw;
        }
        total += term;
    }
    return total;
}

/// P(shift + scale * x), expanded one variable at a time with binomial coefficients.
inline Polynomial substitute_affine(const Polynomial& P, std::span<const Integer> shift, const Integer& scale) {
    const std::size_t n = P.nvars();
    if (shift.size() != n) throw Error(ErrorCode::dimension_mismatch, "shift dimension differs from n");
    Polynomial current = P;
    for (std::size_t i = 0; i < n; ++i) {
        if (sgn(shift[i]) == 0 && scale == 1) continue;
        // expansion[e][j] = C(e,j) * shift^(e-j) * scale^j
        std::map<unsigned, std::vector<Integer>> expansion;
        Polynomial next(n);
        for (const auto& [m, c] : current.terms()) {
            const unsigned e = m[i];
            auto it = expansion.find(e);
            if (it == expansion.end()) {
                std::vector<Integer> row(e + 1);
                for (unsigned j = 0; j <= e; ++j) {
                    row[j] = binomial(e, j) * ipow(shift[i], e - j) * ipow(scale, j);
                }
                it = expansion.emplace(e, std::move(row)).first;
            }
            for (unsigned j = 0; j <= e; ++j) {
                if (sgn(it->second[j]) == 0) continue;
                next.add_term(m.with(i, j), c * it->second[j]);
            }
        }
        current = std::move(next);
    }
    return current;
}

/// P(r + p x).
inline Polynomial shift_scale(const Polynomial& P, std::span<const Integer> r, const Prime& p) {
    return substitute_affine(P, r, p.z());
}

/// min over coefficients of val_p; Infinite for the zero polynomial.
inline Valuation content_val(const Polynomial& P, const Prime& p) {
    Valuation best = Valuation::infinite();
    for (const auto& [m, c] : P.terms()) {
        best = min(best, val_p(c, p));
        if (best == Valuation(0)) break;
    }
    return best;
}

struct ThicknessResult {
    std::uint64_t t = 0;
    Polynomial successor;
};

/// Largest t with P(r + p x) = p^t Q(x), and the successor Q.
inline ThicknessResult thickness(const Polynomial& P, std::span<const Integer> r, const Prime& p) {
    if (P.is_zero()) throw Error(ErrorCode::precondition, "thickness of the zero polynomial is undefined");
    if (content_val(P, p) != Valuation(0)) {
        throw Error(ErrorCode::precondition, "thickness requires a p-primitive polynomial; strip the content first");
    }
    Polynomial shifted = shift_scale(P, r, p);
    const std::uint64_t t = content_val(shifted, p).value();
    if (t == 0) return {0, std::move(shifted)};
    return {t, shifted.divide_exact(ipow(p.z(), t))};
}

/// Coefficients reduced mod a small modulus, for fast repeated evaluation.
class ModularEvaluator {
public:
    ModularEvaluator(const Polynomial& P, std::uint64_t modulus) : n_(P.nvars()), m_(modulus) {
        for (const auto& [mono, c] : P.terms()) {
            std::uint64_t r = mod_u64(c, m_);
            if (r == 0) continue;
            terms_.push_back({std::vector<unsigned>(mono.exponents().begin(), mono.exponents().end()), r});
        }
    }

    /// Value mod the modulus, for residues already reduced into [0, modulus).
    std::uint64_t operator()(std::span<const std::uint64_t> x) const {
        using u128 = unsigned __int128;
        std::uint64_t total = 0;
        for (const auto& t : terms_) {
            std::uint64_t v = t.coef;
            for (std::size_t i = 0; i < n_ && v != 0; ++i) {
                for (unsigned k = 0; k < t.exps[i]; ++k) v = static_cast<std::uint64_t>(u128(v) * x[i] % m_);
            }
            total = static_cast<std::uint64_t>((u128(total) + v) % m_);
        }
        return total;
    }

    bool reduces_to_zero() const noexcept { return terms_.empty(); }

private:
    struct Term {
        std::vector<unsigned> exps;
        std::uint64_t coef;
    };
    std::size_t n_;
    std::uint64_t m_;
    std::vector<Term> terms_;
};

/// p^n as an Integer, for budget checks.
inline Integer residue_count(const Prime& p, std::size_t n, std::uint64_t e = 1) {
    return ipow(p.z(), static_cast<unsigned long>(n * e));
}

/// All residue tuples in [0,p)^n where P vanishes mod p, in lexicographic order.
inline std::vector<Point> roots_mod_p(const Polynomial& P, const Prime& p, std::uint64_t budget = 1'000'000) {
    const std::size_t n = P.nvars();
    const Integer needed = residue_count(p, n);
    if (needed > Integer(static_cast<unsigned long>(budget))) {
        throw Error(ErrorCode::budget, "root search needs p^n = " + needed.get_str() + " evaluations, budget is " +
                                           std::to_string(budget));
    }
    ModularEvaluator eval(P, p.value());
    std::vector<Point> roots;
    std::vector<std::uint64_t> x(n, 0);
    while (true) {
        if (eval(x) == 0) {
            Point pt(n);
            for (std::size_t i = 0; i < n; ++i) pt[i] = static_cast<unsigned long>(x[i]);
            roots.push_back(std::move(pt));
        }
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++x[i] < p.value()) break;
            x[i] = 0;
            if (i == 0) return roots;
        }
    }
}

inline Polynomial partial_derivative(const Polynomial& P, std::size_t i) {
    if (i >= P.nvars()) throw Error(ErrorCode::dimension_mismatch, "variable index out of range");
    Polynomial out(P.nvars());
    for (const auto& [m, c] : P.terms()) {
        if (m[i] == 0) continue;
        out.add_term(m.with(i, m[i] - 1), c * m[i]);
    }
    return out;
}

/// Smallest h such that the degree-h Taylor component of P at r is nonzero mod p.
inline unsigned multiplicity_mod_p(const Polynomial& P, std::span<const Integer> r, const Prime& p) {
    Polynomial local = substitute_affine(P, r, Integer(1));
    std::optional<unsigned> best;
    for (const auto& [m, c] : local.terms()) {
        if (mod_u64(c, p.value()) == 0) continue;
        if (!best || m.degree() < *best) best = m.degree();
    }
    if (!best) throw Error(ErrorCode::precondition, "multiplicity is undefined when P reduces to 0 mod p");
    return *best;
}

/// Total degree of the successor's reduction mod p.
inline unsigned residual_degree(const Polynomial& P, std::span<const Integer> r, const Prime& p) {
    auto [t, Q] = thickness(P, r, p);
    unsigned deg = 0;
    for (const auto& [m, c] : Q.terms()) {
        if (mod_u64(c, p.value()) != 0) deg = std::max(deg, m.degree());
    }
    return deg;
}

/// For a bivariate P with no mixed terms, the univariate pair (F, G) with
/// P(x,y) = F(x) + G(y); the constant term goes to F.
inline std::optional<std::pair<Polynomial, Polynomial>> split_separated(const Polynomial& P) {
    if (P.nvars() != 2) throw Error(ErrorCode::dimension_mismatch, "split_separated expects two variables");
    Polynomial F(1), G(1);
    for (const auto& [m, c] : P.terms()) {
        if (m[0] > 0 && m[1] > 0) return std::nullopt;
        if (m[1] == 0) {
            F.add_term(Monomial({m[0]}), c);
        } else {
            G.add_term(Monomial({m[1]}), c);
        }
    }
    return std::make_pair(std::move(F), std::move(G));
}

/// Variable names used by the text form: x, y, z for n <= 3, otherwise x1..xn.
inline std::string variable_name(std::size_t i, std::size_t n) {
    if (n <= 3) return std::string(1, "xyz"[i]);
    return "x" + std::to_string(i + 1);
}

/// Canonical text: descending total degree, then descending exponents.
inline std::string to_string(const Polynomial& P) {
    if (P.is_zero()) return "0";
    std::vector<std::pair<const Monomial*, const Integer*>> order;
    for (const auto& [m, c] : P.terms()) order.emplace_back(&m, &c);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first->degree() != b.first->degree()) return a.first->degree() > b.first->degree();
        return *b.first < *a.first;
    });
    std::string out;
    bool first = true;
    for (const auto& [m, c] : order) {
        Integer mag = abs(*c);
        if (first) {
            if (sgn(*c) < 0) out += "-";
        } else {
            out += sgn(*c) < 0 ? " - " : " + ";
        }
        first = false;
        std::string vars;
        for (std::size_t i = 0; i < m->size(); ++i) {
            if ((*m)[i] == 0) continue;
            if (!vars.empty()) vars += "*";
            vars += variable_name(i, P.nvars());
            if ((*m)[i] > 1) vars += "^" + std::to_string((*m)[i]);
        }
        if (vars.empty()) {
            out += mag.get_str();
        } else if (mag == 1) {
            out += vars;
        } else {
            out += mag.get_str() + "*" + vars;
        }
    }
    return out;
}

}  // namespace ptrunk
