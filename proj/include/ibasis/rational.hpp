#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <string>
#include <string_view>

#include "ibasis/errors.hpp"

namespace ibasis {

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d) : v_(n, d) {
        if (d == 0) fail(ErrKind::DivisionByZero, "rational with zero denominator");
        v_.canonicalize();
    }
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }
    Rational(mpz_class n, mpz_class d) : v_(std::move(n), std::move(d)) {
        if (v_.get_den() == 0) fail(ErrKind::DivisionByZero, "rational with zero denominator");
        v_.canonicalize();
    }

    /// Accepts "p", "-p", or "p/q" in base 10.
    static Rational parse(std::string_view s) {
        mpq_class v;
        if (s.empty() || v.set_str(std::string(s), 10) != 0)
            fail(ErrKind::ParseError, "invalid rational literal '" + std::string(s) + "'");
        if (v.get_den() == 0) fail(ErrKind::DivisionByZero, "rational with zero denominator");
        v.canonicalize();
        return Rational(std::move(v));
    }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    bool definitely_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) fail(ErrKind::DivisionByZero, "rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational inverse() const {
        if (is_zero()) fail(ErrKind::DivisionByZero, "inverse of zero");
        return Rational(mpq_class(1) / v_);
    }

    Rational abs() const { return sign() < 0 ? -*this : *this; }

    mpz_class floor() const {
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return f;
    }

    /// Representative of this value modulo 1, in [0, 1).
    Rational frac01() const { return *this - Rational(floor(), 1); }

    bool fits_long() const { return is_integer() && num().fits_slong_p(); }

    long to_long() const {
        if (!fits_long()) fail(ErrKind::Internal, "rational does not fit a long: " + to_string());
        return num().get_si();
    }

    Rational pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        mpz_class n, d;
        mpz_pow_ui(n.get_mpz_t(), num().get_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(d.get_mpz_t(), den().get_mpz_t(), static_cast<unsigned long>(e));
        return Rational(std::move(n), std::move(d));
    }

    std::string to_string() const { return v_.get_str(); }

  private:
    mpq_class v_;
};

inline Rational binomial(long n, long k) {
    if (k < 0 || k > n) return Rational(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(std::move(b), mpz_class(1));
}

inline mpz_class lcm_z(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline mpz_class gcd_z(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

} // namespace ibasis
