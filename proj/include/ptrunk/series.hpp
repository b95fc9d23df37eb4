#pragma once

/**
 * @file series.hpp
 * @brief Dense univariate polynomials in T over Q, exact rational functions,
 *        and truncated power series.
 */

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ptrunk/arith.hpp"

namespace ptrunk {

/// Dense polynomial in T with rational coefficients; no trailing zeros.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    QPoly(const Rational& constant) {  // NOLINT(google-explicit-constructor)
        if (sgn(constant) != 0) c_.push_back(constant);
    }

    /// c * T^k
    static QPoly monomial(const Rational& c, std::size_t k) {
        if (sgn(c) == 0) return {};
        std::vector<Rational> v(k + 1);
        v[k] = c;
        return QPoly(std::move(v));
    }

    /// 1 + T + ... + T^{m-1}; zero when m = 0.
    static QPoly ones(std::size_t m) { return QPoly(std::vector<Rational>(m, Rational(1))); }

    bool is_zero() const noexcept { return c_.empty(); }
    /// Degree; -1 for the zero polynomial.
    long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }
    const std::vector<Rational>& coeffs() const noexcept { return c_; }
    Rational operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    QPoly& operator+=(const QPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    QPoly& operator-=(const QPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    friend QPoly operator+(QPoly a, const QPoly& b) { return a += b; }
    friend QPoly operator-(QPoly a, const QPoly& b) { return a -= b; }
    friend QPoly operator-(QPoly a) {
        for (auto& x : a.c_) x = -x;
        return a;
    }
    friend QPoly operator*(const QPoly& a, const QPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (sgn(a.c_[i]) == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        }
        return QPoly(std::move(out));
    }
    friend QPoly operator*(const Rational& s, QPoly a) {
        if (sgn(s) == 0) return {};
        for (auto& x : a.c_) x *= s;
        return a;
    }

    QPoly pow(unsigned e) const {
        QPoly r(Rational(1)), b = *this;
        while (e) {
            if (e & 1u) r = r * b;
            e >>= 1u;
            if (e) b = b * b;
        }
        return r;
    }

    /// Quotient and remainder; divisor must be nonzero.
    static std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
        if (b.is_zero()) throw Error(ErrorCode::domain, "polynomial division by zero");
        std::vector<Rational> rem = a.c_;
        const std::size_t db = b.c_.size() - 1;
        if (rem.size() <= db) return {QPoly{}, a};
        std::vector<Rational> quo(rem.size() - db);
        const Rational inv = 1 / b.c_.back();
        for (std::size_t i = rem.size(); i-- > db;) {
            if (sgn(rem[i]) == 0) continue;
            Rational f = rem[i] * inv;
            quo[i - db] = f;
            for (std::size_t j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c_[j];
        }
        return {QPoly(std::move(quo)), QPoly(std::move(rem))};
    }

    QPoly monic() const {
        if (is_zero()) return {};
        return (1 / leading()) * *this;
    }

    /// Monic gcd; gcd(0, 0) = 0.
    static QPoly gcd(QPoly a, QPoly b) {
        while (!b.is_zero()) {
            auto r = divmod(a, b).second;
            a = std::move(b);
            b = r.monic();
        }
        return a.monic();
    }

    Rational eval(const Rational& t) const {
        Rational acc = 0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * t + c_[i];
        return acc;
    }

    friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

private:
    void trim() {
        while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

inline std::string to_string(const QPoly& q, const std::string& var = "T") {
    if (q.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (std::size_t i = q.coeffs().size(); i-- > 0;) {
        const Rational& c = q.coeffs()[i];
        if (sgn(c) == 0) continue;
        Rational mag = abs(c);
        out += first ? (sgn(c) < 0 ? "-" : "") : (sgn(c) < 0 ? " - " : " + ");
        first = false;
        std::string mono = i == 0 ? "" : (i == 1 ? var : var + "^" + std::to_string(i));
        if (mono.empty()) {
            out += mag.get_str();
        } else if (mag == 1) {
            out += mono;
        } else {
            out += mag.get_str() + "*" + mono;
        }
    }
    return out;
}

/// Truncated series c_0..c_E.
struct SeriesTruncation {
    std::vector<Rational> coeffs;

    std::size_t order() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    friend bool operator==(const SeriesTruncation&, const SeriesTruncation&) = default;
};

/// N/D in lowest terms, D monic with D(0) != 0.
class RationalFunction {
public:
    RationalFunction() : num_(), den_(Rational(1)) {}
    RationalFunction(const QPoly& num) : num_(num), den_(Rational(1)) {}  // NOLINT(google-explicit-constructor)
    RationalFunction(const QPoly& num, const QPoly& den) : num_(num), den_(den) { normalize(); }

    /// 1 / (1 - c T^k)
    static RationalFunction geometric(const Rational& c, std::size_t k) {
        return {QPoly(Rational(1)), QPoly(Rational(1)) - QPoly::monomial(c, k)};
    }

    const QPoly& numerator() const noexcept { return num_; }
    const QPoly& denominator() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_.is_zero(); }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
        if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
        QPoly g = QPoly::gcd(a.den_, b.den_);
        QPoly bq = QPoly::divmod(b.den_, g).first;
        QPoly aq = QPoly::divmod(a.den_, g).first;
        return {a.num_ * bq + b.num_ * aq, a.den_ * bq};
    }
    friend RationalFunction operator-(const RationalFunction& a) { return {-a.num_, a.den_}; }
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
        if (b.is_zero()) throw Error(ErrorCode::domain, "division by the zero rational function");
        return {a.num_ * b.den_, a.den_ * b.num_};
    }
    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }

    /// Power series coefficients c_0..c_E.
    SeriesTruncation expand(std::size_t E) const {
        SeriesTruncation s;
        s.coeffs.resize(E + 1);
        const Rational inv = 1 / den_[0];
        const auto& d = den_.coeffs();
        for (std::size_t i = 0; i <= E; ++i) {
            Rational acc = num_[i];
            const std::size_t lim = std::min(i, d.size() - 1);
            for (std::size_t j = 1; j <= lim; ++j) {
                if (sgn(d[j]) != 0) acc -= d[j] * s.coeffs[i - j];
            }
            s.coeffs[i] = acc * inv;
        }
        return s;
    }

    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

private:
    void normalize() {
        if (den_.is_zero()) throw Error(ErrorCode::domain, "rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = QPoly(Rational(1));
            return;
        }
        QPoly g = QPoly::gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = QPoly::divmod(num_, g).first;
            den_ = QPoly::divmod(den_, g).first;
        }
        Rational lc = den_.leading();
        num_ = (1 / lc) * num_;
        den_ = (1 / lc) * den_;
        if (sgn(den_[0]) == 0) {
            throw Error(ErrorCode::domain, "rational function has a pole at T = 0");
        }
    }

    QPoly num_;
    QPoly den_;
};

inline std::string to_string(const RationalFunction& f) {
    if (f.denominator().degree() == 0) return to_string(f.numerator());
    return "(" + to_string(f.numerator()) + ") / (" + to_string(f.denominator()) + ")";
}

inline std::ostream& operator<<(std::ostream& os, const RationalFunction& f) { return os << to_string(f); }

/// Series sum a + b, truncated to the shorter order.
inline SeriesTruncation operator+(const SeriesTruncation& a, const SeriesTruncation& b) {
    SeriesTruncation out;
    const std::size_t len = std::min(a.coeffs.size(), b.coeffs.size());
    out.coeffs.resize(len);
    for (std::size_t i = 0; i < len; ++i) out.coeffs[i] = a.coeffs[i] + b.coeffs[i];
    return out;
}

}  // namespace ptrunk
