#pragma once

/**
 * @file parse.hpp
 * @brief Recursive-descent parser for polynomial text.
 *
 *   expr   := ['+'|'-'] term (('+'|'-') term)*
 *   term   := factor ('*'? factor)*
 *   factor := '-' factor | atom ('^' natural)?
 *   atom   := integer | variable | '(' expr ')'
 *
 * Variables are x, y, z or x1..xn; the two styles cannot be mixed.
 */

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptrunk/polynomial.hpp"

namespace ptrunk {

inline constexpr unsigned kMaxParsedExponent = 4096;

namespace detail {

/// Two passes: a variable scan fixes n, then the descent builds the polynomial.
class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Polynomial run(std::optional<std::size_t> nvars_hint) {
        // First pass collects variable names so n is known before building.
        scan_variables();
        std::size_t n = std::max<std::size_t>(max_index_ + 1, 1);
        if (nvars_hint) {
            if (*nvars_hint < n) {
                throw Error(ErrorCode::parse, "polynomial uses " + std::to_string(n) + " variables but n = " +
                                                  std::to_string(*nvars_hint) + " was requested");
            }
            n = *nvars_hint;
        }
        if (n == 0) throw Error(ErrorCode::parse, "n must be at least 1");
        n_ = n;
        pos_ = 0;
        skip_ws();
        if (pos_ >= s_.size()) fail("empty expression");
        Polynomial out = expr();
        skip_ws();
        if (pos_ < s_.size()) fail(std::string("unexpected character '") + s_[pos_] + "'");
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::parse, "parse error at position " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    // Returns the 0-based variable index at pos_, advancing past it, or nullopt.
    std::optional<std::size_t> lex_variable(bool record) {
        if (pos_ >= s_.size()) return std::nullopt;
        char c = s_[pos_];
        if (c == 'x' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
            std::size_t start = pos_ + 1;
            std::size_t end = start;
            while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
            if (end - start > 6) fail("variable index too large");
            std::size_t idx = std::stoul(std::string(s_.substr(start, end - start)));
            if (idx == 0) fail("variable indices start at x1");
            if (record) note_style(true);
            pos_ = end;
            return idx - 1;
        }
        if (c == 'x' || c == 'y' || c == 'z') {
            if (record) note_style(false);
            ++pos_;
            return static_cast<std::size_t>(c == 'x' ? 0 : c == 'y' ? 1 : 2);
        }
        return std::nullopt;
    }

    void note_style(bool indexed) {
        if (!style_) {
            style_ = indexed;
        } else if (*style_ != indexed) {
            fail("cannot mix x,y,z with x1..xn variable names");
        }
    }

    void scan_variables() {
        pos_ = 0;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c))) {
                auto v = lex_variable(true);
                if (!v) fail(std::string("unknown variable '") + c + "'");
                max_index_ = std::max<long long>(max_index_, static_cast<long long>(*v));
            } else {
                ++pos_;
            }
        }
    }

    Polynomial expr() {
        Polynomial acc(n_);
        bool first = true;
        while (true) {
            skip_ws();
            bool negate = false;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                negate = s_[pos_] == '-';
                ++pos_;
            } else if (!first) {
                break;
            }
            Polynomial t = term();
            if (negate) {
                acc -= t;
            } else {
                acc += t;
            }
            first = false;
        }
        return acc;
    }

    bool starts_factor() {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '(' || c == 'x' || c == 'y' || c == 'z';
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (true) {
            if (peek('*')) {
                ++pos_;
                acc = acc * factor();
            } else if (starts_factor()) {
                acc = acc * factor();
            } else {
                break;
            }
        }
        return acc;
    }

    Polynomial factor() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '-') {
            ++pos_;
            return -factor();
        }
        Polynomial base = atom();
        if (peek('^')) {
            ++pos_;
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("exponent must be a natural number");
            std::string digits(s_.substr(start, pos_ - start));
            if (digits.size() > 5 || std::stoul(digits) > kMaxParsedExponent) {
                fail("exponent exceeds " + std::to_string(kMaxParsedExponent));
            }
            if (peek('^')) fail("chained exponents are ambiguous; use parentheses");
            return base.pow(static_cast<unsigned>(std::stoul(digits)));
        }
        return base;
    }

    Polynomial atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return Polynomial::constant(n_, Integer(std::string(s_.substr(start, pos_ - start))));
        }
        if (c == '(') {
            if (++depth_ > 512) fail("parentheses nested too deeply");
            ++pos_;
            Polynomial inner = expr();
            --depth_;
            if (!peek(')')) fail("expected ')'");
            ++pos_;
            return inner;
        }
        if (auto v = lex_variable(false)) return Polynomial::variable(n_, *v);
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t n_ = 1;
    long long max_index_ = -1;
    int depth_ = 0;
    std::optional<bool> style_;
};

}  // namespace detail

/// Parse polynomial text. With a hint, n is that value (it must cover every variable used).
inline Polynomial parse_polynomial(std::string_view text, std::optional<std::size_t> nvars = std::nullopt) {
    return detail::Parser(text).run(nvars);
}

}  // namespace ptrunk
