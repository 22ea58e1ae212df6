#pragma once

#include <string>

#include "ibasis/logseries.hpp"
#include "ibasis/oreops.hpp"

namespace ibasis {

namespace detail {

inline std::string monomial_str(const Rational& coeff, const std::string& var, int deg) {
    std::string pw;
    if (deg == 1)
        pw = var;
    else if (deg > 1)
        pw = var + "^" + std::to_string(deg);
    if (deg == 0) return coeff.to_string();
    if (coeff.is_one()) return pw;
    if ((-coeff).is_one()) return "-" + pw;
    return coeff.to_string() + "*" + pw;
}

} // namespace detail

/// Expanded sparse form, highest power first: "24*x^3 - 134*x^2 + 373*x - 450".
inline std::string poly_to_string(const QPoly& p, const std::string& var = "x") {
    if (p.is_zero()) return "0";
    std::string out;
    for (int i = p.degree(); i >= 0; --i) {
        Rational c = p.coeff(i);
        if (c.is_zero()) continue;
        if (out.empty()) {
            out = detail::monomial_str(c, var, i);
        } else {
            bool neg = c.sign() < 0;
            out += neg ? " - " : " + ";
            out += detail::monomial_str(neg ? -c : c, var, i);
        }
    }
    return out;
}

struct CoeffStr {
    std::string text;     // magnitude, sign already removed
    bool negative = false;
    bool is_unit = false;       // magnitude is exactly 1
    bool needs_paren = false;   // wrap in (...) when juxtaposed with *D^k
};

/// Canonical fraction form of a rational function: integer-content
/// numerator and denominator, sign pulled out front.
inline CoeffStr ratfun_parts(const RatFun& f, const std::string& var = "x") {
    CoeffStr out;
    if (f.is_zero()) {
        out.text = "0";
        return out;
    }
    auto [an, bn] = integerized(f.num());
    auto [ad, bd] = integerized(f.den());
    QPoly p = an * Rational(bd, 1);
    QPoly q = ad * Rational(bn, 1);
    auto content = [](const QPoly& h) {
        mpz_class c = 0;
        for (const auto& v : h.coeffs()) c = gcd_z(c, v.num());
        return c == 0 ? mpz_class(1) : c;
    };
    Rational g(gcd_z(content(p), content(q)), mpz_class(1));
    p = g.inverse() * p;
    q = g.inverse() * q;
    if (q.lc().sign() < 0) {
        p = -p;
        q = -q;
    }
    if (p.lc().sign() < 0) {
        out.negative = true;
        p = -p;
    }
    auto count_terms = [](const QPoly& h) {
        int n = 0;
        for (int i = 0; i <= h.degree(); ++i)
            if (!h.coeff(i).is_zero()) ++n;
        return n;
    };
    std::string ptxt = poly_to_string(p, var);
    if (q.is_one()) {
        out.text = ptxt;
        out.is_unit = p.is_one();
        out.needs_paren = count_terms(p) > 1;
        return out;
    }
    if (count_terms(p) > 1) ptxt = "(" + ptxt + ")";
    std::string qtxt = poly_to_string(q, var);
    // a bare integer or a bare power of the variable needs no parentheses
    bool q_atomic = q.degree() == 0 || (count_terms(q) == 1 && q.lc().is_one());
    if (!q_atomic) qtxt = "(" + qtxt + ")";
    out.text = ptxt + "/" + qtxt;
    return out;
}

inline std::string ratfun_to_string(const RatFun& f, const std::string& var = "x") {
    CoeffStr c = ratfun_parts(f, var);
    return c.negative ? "-" + c.text : c.text;
}

namespace detail {

inline std::string ore_like_to_string(const std::vector<RatFun>& coeffs, const std::string& var,
                                      const std::string& dvar) {
    std::string out;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
        const RatFun& c = coeffs[static_cast<size_t>(k)];
        if (c.is_zero()) continue;
        CoeffStr cs = ratfun_parts(c, var);
        std::string dpart;
        if (k == 1)
            dpart = dvar;
        else if (k > 1)
            dpart = dvar + "^" + std::to_string(k);
        std::string mag;
        if (k == 0)
            mag = (cs.negative && cs.needs_paren) ? "(" + cs.text + ")" : cs.text;
        else if (cs.is_unit)
            mag = dpart;
        else
            mag = (cs.needs_paren ? "(" + cs.text + ")" : cs.text) + "*" + dpart;
        if (out.empty())
            out = (cs.negative ? "-" : "") + mag;
        else
            out += (cs.negative ? " - " : " + ") + mag;
    }
    return out.empty() ? "0" : out;
}

} // namespace detail

inline std::string ore_to_string(const OrePoly& p, const std::string& var = "x", const std::string& dvar = "D") {
    return detail::ore_like_to_string(p.coeffs(), var, dvar);
}

inline std::string basis_elem_to_string(const BasisElement& e, const std::string& var = "x",
                                        const std::string& dvar = "D") {
    return detail::ore_like_to_string(e.coeffs(), var, dvar);
}

inline std::string kelem_to_string(const KElem& e, const std::string& gen = "t") {
    if (e.is_rational_value()) return e.as_rational().to_string();
    return poly_to_string(e.rep(), gen);
}

inline std::string exponent_str(const Rational& e) {
    if (e.is_integer()) return e.to_string();
    return "(" + e.to_string() + ")";
}

/// Display form of a local series; `var` names the local variable, e.g. "x"
/// or "(x-1)" or "(x-t)".
inline std::string logseries_to_string(const LogSeries& f, const std::string& var = "x",
                                       const std::string& gen = "t") {
    std::string out;
    for (const auto& [k, c] : f.terms()) {
        bool neg = false;
        std::string coeff;
        if (c.is_rational_value()) {
            Rational v = c.as_rational();
            neg = v.sign() < 0;
            coeff = (neg ? -v : v).to_string();
        } else {
            coeff = "(" + poly_to_string(c.rep(), gen) + ")";
        }
        std::string mono;
        if (k.exp.is_one())
            mono = var;
        else if (!k.exp.is_zero())
            mono = var + "^" + exponent_str(k.exp);
        if (k.logpow >= 1) {
            if (!mono.empty()) mono += "*";
            mono += "log(" + var + ")";
            if (k.logpow > 1) mono += "^" + std::to_string(k.logpow);
        }
        std::string term;
        if (mono.empty())
            term = coeff;
        else if (coeff == "1")
            term = mono;
        else
            term = coeff + "*" + mono;
        if (out.empty())
            out = (neg ? "-" : "") + term;
        else
            out += (neg ? " - " : " + ") + term;
    }
    for (const auto& [cls, cut] : f.trunc()) {
        std::string o = "O(" + var + "^" + exponent_str(cut) + ")";
        out += out.empty() ? o : " + " + o;
    }
    return out.empty() ? "0" : out;
}

} // namespace ibasis
