#pragma once

/**
 * @file arith.hpp
 * @brief Exact integers and rationals, p-adic valuations, and the
 *        factorial/binomial valuation toolkit.
 *
 * All arithmetic goes through GMP. A prime is validated once, when a
 * `Prime` is constructed, and every valuation routine takes a `Prime`.
 */

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "ptrunk/error.hpp"

namespace ptrunk {

using Integer = mpz_class;
using Rational = mpq_class;

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0 || n % 3 == 0) return false;
    for (std::uint64_t d = 5; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

/// A validated prime. Trial division runs once, here.
class Prime {
public:
    explicit Prime(std::uint64_t p) : value_(p), z_(static_cast<unsigned long>(p)) {
        if (p > std::numeric_limits<std::uint32_t>::max()) {
            throw Error(ErrorCode::invalid_prime, "prime " + std::to_string(p) + " exceeds 32 bits");
        }
        if (!is_prime(p)) {
            throw Error(ErrorCode::invalid_prime, std::to_string(p) + " is not a prime");
        }
    }

    std::uint64_t value() const noexcept { return value_; }
    const Integer& z() const noexcept { return z_; }

    friend bool operator==(const Prime& a, const Prime& b) noexcept { return a.value_ == b.value_; }

private:
    std::uint64_t value_;
    Integer z_;
};

/// p-adic valuation: a natural number, or Infinite (the valuation of 0 only).
class Valuation {
public:
    constexpr Valuation() = default;
    constexpr explicit Valuation(std::uint64_t v) : finite_(true), value_(v) {}

    static constexpr Valuation infinite() { return Valuation{}; }

    constexpr bool is_infinite() const noexcept { return !finite_; }
    constexpr bool is_finite() const noexcept { return finite_; }

    std::uint64_t value() const {
        if (!finite_) throw Error(ErrorCode::domain, "valuation is infinite");
        return value_;
    }

    friend constexpr bool operator==(const Valuation& a, const Valuation& b) noexcept {
        return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
    }
    friend constexpr std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) noexcept {
        if (!a.finite_ || !b.finite_) return b.finite_ <=> a.finite_;
        return a.value_ <=> b.value_;
    }
    friend constexpr Valuation operator+(const Valuation& a, const Valuation& b) noexcept {
        if (!a.finite_ || !b.finite_) return infinite();
        return Valuation(a.value_ + b.value_);
    }
    friend constexpr Valuation min(const Valuation& a, const Valuation& b) noexcept { return a <= b ? a : b; }

    friend std::ostream& operator<<(std::ostream& os, const Valuation& v) {
        if (v.is_infinite()) return os << "inf";
        return os << v.value_;
    }

private:
    bool finite_ = false;
    std::uint64_t value_ = 0;
};

inline Valuation val_p(const Integer& a, const Prime& p) {
    if (sgn(a) == 0) return Valuation::infinite();
    mpz_class rest;
    auto k = mpz_remove(rest.get_mpz_t(), a.get_mpz_t(), p.z().get_mpz_t());
    return Valuation(k);
}

inline Valuation val_p(const Integer& a, std::uint64_t p) { return val_p(a, Prime(p)); }

/// Legendre: val_p(k!) = sum_j floor(k / p^j).
inline std::uint64_t val_p_factorial(std::uint64_t k, const Prime& p) {
    std::uint64_t total = 0;
    std::uint64_t q = k;
    while (q > 0) {
        q /= p.value();
        total += q;
    }
    return total;
}

inline std::uint64_t val_p_factorial(std::uint64_t k, std::uint64_t p) { return val_p_factorial(k, Prime(p)); }

inline std::uint64_t val_p_binomial(std::uint64_t n, std::uint64_t k, const Prime& p) {
    if (k > n) {
        throw Error(ErrorCode::domain,
                    "binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") requires k <= n");
    }
    return val_p_factorial(n, p) - val_p_factorial(k, p) - val_p_factorial(n - k, p);
}

inline std::uint64_t val_p_binomial(std::uint64_t n, std::uint64_t k, std::uint64_t p) {
    return val_p_binomial(n, k, Prime(p));
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

/// a / b in lowest terms. The two-argument mpq_class constructor does not reduce.
inline Rational ratio(const Integer& a, const Integer& b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

inline Rational qpow(const Rational& base, unsigned long e) {
    Rational out(ipow(base.get_num(), e), ipow(base.get_den(), e));
    out.canonicalize();
    return out;
}

/// Non-negative remainder of a modulo m (m > 0).
inline Integer mod_floor(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline std::uint64_t mod_u64(const Integer& a, std::uint64_t m) {
    return mpz_fdiv_ui(a.get_mpz_t(), static_cast<unsigned long>(m));
}

}  // namespace ptrunk
