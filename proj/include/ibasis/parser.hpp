#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "ibasis/oreops.hpp"

namespace ibasis {

/// Recursive-descent parser for operator expressions over rationals, the
/// variable, and D:
///   expr   := ('+'|'-')? term (('+'|'-') term)*
///   term   := factor (('*'|'/')? factor)*   (juxtaposition multiplies)
///   factor := atom ('^' uint)?
///   atom   := rational | var | 'D' | '(' expr ')'
/// Multiplication is the noncommutative Ore product; division is only
/// defined by D-free expressions.
class OperatorParser {
  public:
    explicit OperatorParser(std::string_view text, char var = 'x', bool allow_d = true)
        : s_(text), var_(var), allow_d_(allow_d) {}

    OrePoly parse() {
        skip_ws();
        OrePoly e = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) err("unexpected input");
        return e;
    }

  private:
    std::string_view s_;
    size_t pos_ = 0;
    char var_;
    bool allow_d_;

    [[noreturn]] void err(const std::string& what) {
        fail(ErrKind::ParseError, "syntax error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    OrePoly parse_expr() {
        skip_ws();
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        OrePoly acc = parse_term();
        if (neg) acc = -acc;
        while (true) {
            skip_ws();
            if (eat('+'))
                acc += parse_term();
            else if (eat('-'))
                acc -= parse_term();
            else
                break;
        }
        return acc;
    }

    OrePoly parse_term() {
        OrePoly acc = parse_factor();
        while (true) {
            skip_ws();
            char c = peek();
            if (c == '*') {
                ++pos_;
                acc = acc * parse_factor();
            } else if (c == '/') {
                size_t at = pos_;
                ++pos_;
                OrePoly d = parse_factor();
                if (d.is_zero()) {
                    pos_ = at;
                    err("division by zero");
                }
                if (d.ord_or_neg() > 0) {
                    pos_ = at;
                    err("division by an expression containing D");
                }
                acc = acc * OrePoly(std::vector<RatFun>{d.coeff(0).inverse()});
            } else if (c == '(' || c == var_ || c == 'D' || std::isdigit(static_cast<unsigned char>(c))) {
                acc = acc * parse_factor();
            } else {
                break;
            }
        }
        return acc;
    }

    OrePoly parse_factor() {
        OrePoly a = parse_atom();
        skip_ws();
        if (eat('^')) {
            skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) err("expected a nonnegative integer exponent");
            long e = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                e = e * 10 + (s_[pos_] - '0');
                if (e > 1000) err("exponent too large");
                ++pos_;
            }
            OrePoly r(1);
            for (long i = 0; i < e; ++i) r = r * a;
            return r;
        }
        return a;
    }

    OrePoly parse_atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            OrePoly e = parse_expr();
            skip_ws();
            if (!eat(')')) err("expected ')'");
            return e;
        }
        if (c == var_) {
            ++pos_;
            return OrePoly::term(RatFun(QPoly::variable()), 0);
        }
        if (c == 'D') {
            if (!allow_d_) err("operator symbol D is not allowed here");
            ++pos_;
            return OrePoly::d_var();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            // A '/' directly followed by digits is part of the literal.
            if (peek() == '/' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
                ++pos_;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
            Rational v = Rational::parse(s_.substr(start, pos_ - start));
            return OrePoly(std::vector<RatFun>{RatFun(v)});
        }
        err(c == '\0' ? "unexpected end of input" : std::string("unexpected character '") + c + "'");
    }
};

inline OrePoly parse_operator(std::string_view text) { return OperatorParser(text).parse(); }

/// Parses a plain polynomial in the named variable (no D).
inline QPoly parse_poly(std::string_view text, char var = 'x') {
    OrePoly p = OperatorParser(text, var, false).parse();
    if (p.ord_or_neg() > 0) fail(ErrKind::ParseError, "expected a polynomial");
    RatFun c = p.coeff(0);
    if (!c.is_polynomial()) fail(ErrKind::ParseError, "expected a polynomial, found a denominator");
    return c.num();
}

} // namespace ibasis
