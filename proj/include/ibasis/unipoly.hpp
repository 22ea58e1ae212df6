#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ibasis/rational.hpp"

namespace ibasis {

/// Dense univariate polynomial over a coefficient field C. C must provide
/// value semantics, construction from long, arithmetic operators, is_zero()
/// and inverse(). The variable is contextual (x, t, or nu); printing code
/// supplies its name.
template <class C>
class UniPoly {
  public:
    UniPoly() = default;
    UniPoly(const C& c) : c_{c} { trim(); }
    UniPoly(long n) : c_{C(n)} { trim(); }
    explicit UniPoly(std::vector<C> coeffs) : c_(std::move(coeffs)) { trim(); }

    static UniPoly monomial(const C& coeff, int deg) {
        std::vector<C> v(static_cast<size_t>(deg) + 1);
        v[static_cast<size_t>(deg)] = coeff;
        return UniPoly(std::move(v));
    }
    static UniPoly variable() { return monomial(C(1), 1); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    bool is_one() const { return c_.size() == 1 && (c_[0] - C(1)).is_zero(); }

    C coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c_.size())) return C();
        return c_[static_cast<size_t>(i)];
    }
    const std::vector<C>& coeffs() const { return c_; }

    const C& lc() const {
        if (is_zero()) fail(ErrKind::ZeroPolynomial, "leading coefficient of zero polynomial");
        return c_.back();
    }
    C constant() const { return coeff(0); }

    UniPoly operator-() const {
        UniPoly r(*this);
        for (auto& c : r.c_) c = -c;
        return r;
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<C> v(std::max(a.c_.size(), b.c_.size()));
        for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return UniPoly(std::move(v));
    }
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-b); }
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return UniPoly();
        std::vector<C> v(a.c_.size() + b.c_.size() - 1);
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] = v[i + j] + a.c_[i] * b.c_[j];
        return UniPoly(std::move(v));
    }
    friend UniPoly operator*(const C& s, const UniPoly& p) {
        UniPoly r(p);
        for (auto& c : r.c_) c = s * c;
        r.trim();
        return r;
    }

    UniPoly& operator+=(const UniPoly& o) { return *this = *this + o; }
    UniPoly& operator-=(const UniPoly& o) { return *this = *this - o; }
    UniPoly& operator*=(const UniPoly& o) { return *this = *this * o; }

    friend bool operator==(const UniPoly& a, const UniPoly& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (size_t i = 0; i < a.c_.size(); ++i)
            if (!(a.c_[i] - b.c_[i]).is_zero()) return false;
        return true;
    }
    friend bool operator!=(const UniPoly& a, const UniPoly& b) { return !(a == b); }

    UniPoly derivative() const {
        if (c_.size() <= 1) return UniPoly();
        std::vector<C> v(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) v[i - 1] = C(static_cast<long>(i)) * c_[i];
        return UniPoly(std::move(v));
    }

    C eval(const C& x) const {
        C r;
        for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    /// p(x + a), computed by Horner over C.
    UniPoly shifted(const C& a) const {
        UniPoly r;
        UniPoly lin(std::vector<C>{a, C(1)});
        for (size_t i = c_.size(); i-- > 0;) r = r * lin + UniPoly(c_[i]);
        return r;
    }

    template <class F>
    auto map_coeffs(F&& f) const -> UniPoly<decltype(f(std::declval<C>()))> {
        using D = decltype(f(std::declval<C>()));
        std::vector<D> v;
        v.reserve(c_.size());
        for (const auto& c : c_) v.push_back(f(c));
        return UniPoly<D>(std::move(v));
    }

    std::pair<UniPoly, UniPoly> divrem(const UniPoly& d) const {
        if (d.is_zero()) fail(ErrKind::DivisionByZero, "polynomial division by zero");
        UniPoly r(*this);
        if (r.degree() < d.degree()) return {UniPoly(), r};
        C lead_inv = d.lc().inverse();
        std::vector<C> q(static_cast<size_t>(r.degree() - d.degree()) + 1);
        while (!r.is_zero() && r.degree() >= d.degree()) {
            int k = r.degree() - d.degree();
            C f = r.lc() * lead_inv;
            q[static_cast<size_t>(k)] = f;
            r -= f * (d * monomial(C(1), k));
        }
        return {UniPoly(std::move(q)), r};
    }

    UniPoly exact_div(const UniPoly& d) const {
        auto [q, r] = divrem(d);
        if (!r.is_zero()) fail(ErrKind::Internal, "exact_div with nonzero remainder");
        return q;
    }

    bool divides(const UniPoly& p) const { return p.divrem(*this).second.is_zero(); }

    UniPoly monic() const {
        if (is_zero()) return *this;
        return lc().inverse() * *this;
    }

    UniPoly pow(long e) const {
        if (e < 0) fail(ErrKind::Internal, "negative polynomial power");
        UniPoly r(1);
        UniPoly b(*this);
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

  private:
    std::vector<C> c_; // dense, low to high

    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
};

using QPoly = UniPoly<Rational>;

/// Monic greatest common divisor over Q; gcd(p, 0) = monic(p).
inline QPoly poly_gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = a.divrem(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

inline QPoly poly_lcm(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    return (a * b).exact_div(poly_gcd(a, b)).monic();
}

/// Extended Euclid on (a, m): returns (g, s) with s*a = g mod m, g monic.
inline std::pair<QPoly, QPoly> poly_half_xgcd(QPoly a, QPoly m) {
    QPoly r0 = std::move(a), r1 = std::move(m);
    QPoly s0(1), s1;
    while (!r1.is_zero()) {
        auto [q, r] = r0.divrem(r1);
        QPoly s = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r0.is_zero()) return {r0, s0};
    Rational inv = r0.lc().inverse();
    return {inv * r0, inv * s0};
}

/// Monic product of the distinct irreducible factors of p.
inline QPoly squarefree_part(const QPoly& p) {
    if (p.is_zero()) fail(ErrKind::ZeroPolynomial, "squarefree part of zero polynomial");
    if (p.degree() == 0) return QPoly(1);
    QPoly g = poly_gcd(p, p.derivative());
    return p.exact_div(g).monic();
}

/// Yun squarefree decomposition: monic pairwise-coprime factors with their
/// multiplicities, nonconstant factors only.
inline std::vector<std::pair<QPoly, int>> squarefree_decomposition(const QPoly& p) {
    if (p.is_zero()) fail(ErrKind::ZeroPolynomial, "squarefree decomposition of zero polynomial");
    std::vector<std::pair<QPoly, int>> out;
    QPoly f = p.monic();
    if (f.degree() == 0) return out;
    QPoly a = poly_gcd(f, f.derivative());
    QPoly b = f.exact_div(a);
    QPoly c = f.derivative().exact_div(a);
    QPoly d = c - b.derivative();
    int i = 1;
    while (b.degree() > 0) {
        QPoly g = poly_gcd(b, d);
        if (g.degree() > 0) out.emplace_back(g, i);
        b = b.exact_div(g);
        c = d.exact_div(g);
        d = c - b.derivative();
        ++i;
    }
    return out;
}

namespace detail {

inline std::vector<mpz_class> divisors_of(mpz_class n) {
    n = ::abs(n);
    std::vector<std::pair<mpz_class, int>> fac;
    mpz_class d = 2;
    // Trial division; inputs at this scale are tiny. A residual cofactor is
    // treated as a single prime.
    while (d * d <= n && d < 2000000) {
        if (n % d == 0) {
            int e = 0;
            while (n % d == 0) {
                n /= d;
                ++e;
            }
            fac.emplace_back(d, e);
        }
        d += (d == 2) ? 1 : 2;
    }
    if (n > 1) fac.emplace_back(n, 1);
    std::vector<mpz_class> divs{1};
    for (const auto& [q, e] : fac) {
        size_t base = divs.size();
        mpz_class pw = 1;
        for (int k = 1; k <= e; ++k) {
            pw *= q;
            for (size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pw);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

} // namespace detail

/// All rational roots of p with multiplicities, sorted ascending.
inline std::vector<std::pair<Rational, int>> rational_roots(const QPoly& p) {
    if (p.is_zero()) fail(ErrKind::ZeroPolynomial, "roots of zero polynomial");
    std::vector<std::pair<Rational, int>> roots;
    QPoly f = p;
    int mult0 = 0;
    while (!f.is_zero() && f.coeff(0).is_zero()) {
        f = f.exact_div(QPoly::variable());
        ++mult0;
    }
    if (mult0 > 0) roots.emplace_back(Rational(0), mult0);
    if (f.degree() < 1) {
        std::sort(roots.begin(), roots.end());
        return roots;
    }
    mpz_class den_lcm = 1;
    for (const auto& c : f.coeffs()) den_lcm = lcm_z(den_lcm, c.den());
    std::vector<mpz_class> ic;
    for (const auto& c : f.coeffs()) ic.push_back(c.num() * (den_lcm / c.den()));
    mpz_class content = 0;
    for (const auto& c : ic) content = gcd_z(content, c);
    for (auto& c : ic) c /= content;
    auto nums = detail::divisors_of(ic.front());
    auto dens = detail::divisors_of(ic.back());
    std::vector<Rational> candidates;
    for (const auto& a : nums)
        for (const auto& b : dens) {
            Rational r(a, b);
            candidates.push_back(r);
            candidates.push_back(-r);
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const auto& r : candidates) {
        int mult = 0;
        while (f.degree() >= 1 && f.eval(r).is_zero()) {
            f = f.exact_div(QPoly(std::vector<Rational>{-r, Rational(1)}));
            ++mult;
        }
        if (mult > 0) roots.emplace_back(r, mult);
        if (f.degree() < 1) break;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Integer content-normalised form (A, B): p = A/B with A an integer-
/// coefficient polynomial, B a positive integer, gcd(content(A), B) = 1.
/// Used by the printer.
inline std::pair<QPoly, mpz_class> integerized(const QPoly& p) {
    if (p.is_zero()) return {p, mpz_class(1)};
    mpz_class den_lcm = 1;
    for (const auto& c : p.coeffs()) den_lcm = lcm_z(den_lcm, c.den());
    std::vector<mpz_class> vs;
    mpz_class content = 0;
    for (const auto& c : p.coeffs()) {
        mpz_class v = c.num() * (den_lcm / c.den());
        content = gcd_z(content, v);
        vs.push_back(std::move(v));
    }
    mpz_class g = gcd_z(content, den_lcm);
    std::vector<Rational> ic;
    ic.reserve(vs.size());
    for (auto& v : vs) ic.emplace_back(v / g, mpz_class(1));
    return {QPoly(std::move(ic)), den_lcm / g};
}

} // namespace ibasis
