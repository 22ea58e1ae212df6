#pragma once

#include <utility>

#include "ibasis/unipoly.hpp"

namespace ibasis {

/// Rational function over Q in canonical form: monic denominator coprime to
/// the numerator; zero is 0/1.
class RatFun {
  public:
    RatFun() : num_(), den_(1) {}
    RatFun(long n) : num_(n), den_(1) {}
    RatFun(Rational r) : num_(std::move(r)), den_(1) {}
    RatFun(QPoly p) : num_(std::move(p)), den_(1) {}
    RatFun(QPoly n, QPoly d) : num_(std::move(n)), den_(std::move(d)) { canonicalize(); }

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool definitely_zero() const { return num_.is_zero(); }
    bool is_one() const { return den_.is_one() && num_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_constant() const { return den_.is_one() && num_.is_constant(); }

    RatFun operator-() const { return RatFun(unchecked{}, -num_, den_); }

    friend RatFun operator+(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }
    friend RatFun operator*(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFun operator/(const RatFun& a, const RatFun& b) { return a * b.inverse(); }

    RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
    RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
    RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
    RatFun& operator/=(const RatFun& o) { return *this = *this / o; }

    friend bool operator==(const RatFun& a, const RatFun& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const RatFun& a, const RatFun& b) { return !(a == b); }

    RatFun inverse() const {
        if (is_zero()) fail(ErrKind::DivisionByZero, "inverse of zero rational function");
        return RatFun(den_, num_);
    }

    RatFun derivative() const {
        return RatFun(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

    RatFun pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        return RatFun(unchecked{}, num_.pow(e), den_.pow(e));
    }

    /// Multiplicity of the monic factor p in this function: positive when p
    /// divides the numerator, negative for the denominator.
    int ord_at(const QPoly& p) const {
        if (p.degree() < 1) fail(ErrKind::Internal, "ord_at needs a nonconstant factor");
        if (is_zero()) fail(ErrKind::Internal, "ord_at of zero");
        auto mult = [&](QPoly q) {
            int k = 0;
            while (true) {
                auto [quo, rem] = q.divrem(p);
                if (!rem.is_zero()) return k;
                q = quo;
                ++k;
            }
        };
        return mult(num_) - mult(den_);
    }

  private:
    struct unchecked {};
    RatFun(unchecked, QPoly n, QPoly d) : num_(std::move(n)), den_(std::move(d)) {}

    QPoly num_;
    QPoly den_;

    void canonicalize() {
        if (den_.is_zero()) fail(ErrKind::DivisionByZero, "rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = QPoly(1);
            return;
        }
        QPoly g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = num_.exact_div(g);
            den_ = den_.exact_div(g);
        }
        Rational scale = den_.lc().inverse();
        num_ = scale * num_;
        den_ = scale * den_;
    }
};

} // namespace ibasis
