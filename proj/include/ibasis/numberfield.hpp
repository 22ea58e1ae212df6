#pragma once

#include <exception>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "ibasis/unipoly.hpp"

namespace ibasis {

/// Q[t]/<modulus> with a monic squarefree modulus. The modulus is treated as
/// if it were irreducible; arithmetic that hits a zero divisor reports the
/// discovered factorization instead (dynamic evaluation).
struct NumberField {
    QPoly modulus;
    std::string gen_name = "t";

    static std::shared_ptr<const NumberField> make(QPoly p, std::string name = "t") {
        if (p.degree() < 1) fail(ErrKind::NotAnOperator, "number field modulus must be nonconstant");
        p = p.monic();
        if (poly_gcd(p, p.derivative()).degree() != 0)
            fail(ErrKind::NotAnOperator, "number field modulus must be squarefree");
        auto f = std::make_shared<NumberField>();
        f->modulus = std::move(p);
        f->gen_name = std::move(name);
        return f;
    }
};

using FieldPtr = std::shared_ptr<const NumberField>;

struct SplitEvent {
    QPoly old_modulus;
    std::vector<QPoly> factors; // monic, nonconstant, product = old_modulus
};

/// Control-flow exception: a zero divisor was met while computing modulo a
/// reducible modulus. The caller restarts the affected computation with the
/// refined factors.
class SplitError : public std::exception {
  public:
    explicit SplitError(SplitEvent ev) : ev_(std::move(ev)) {}
    const SplitEvent& event() const { return ev_; }
    const char* what() const noexcept override { return "modulus split during dynamic evaluation"; }

  private:
    SplitEvent ev_;
};

/// Element of Q or of a NumberField. A null field means plain Q; mixing a
/// plain-rational value into field arithmetic promotes it.
class KElem {
  public:
    KElem() = default;
    KElem(long n) : rep_(Rational(n)) {}
    KElem(Rational r) : rep_(std::move(r)) {}
    KElem(FieldPtr f, QPoly rep) : field_(std::move(f)), rep_(std::move(rep)) { reduce(); }

    static KElem generator(FieldPtr f) { return KElem(std::move(f), QPoly::variable()); }

    const FieldPtr& field() const { return field_; }
    const QPoly& rep() const { return rep_; }

    bool is_rational_value() const { return rep_.degree() <= 0; }
    Rational as_rational() const {
        if (!is_rational_value()) fail(ErrKind::Internal, "number field element is not rational");
        return rep_.constant();
    }

    /// Structural zero test; never splits. False only means "not the zero
    /// representative".
    bool definitely_zero() const { return rep_.is_zero(); }

    bool is_zero() const {
        if (rep_.is_zero()) return true;
        if (!field_) return false;
        QPoly g = poly_gcd(rep_, field_->modulus);
        if (g.degree() == 0) return false;
        throw SplitError(split_on(g));
    }

    KElem operator-() const { return KElem(field_, -rep_); }

    friend KElem operator+(const KElem& a, const KElem& b) {
        FieldPtr f = joint_field(a, b);
        return KElem(f, a.rep_ + b.rep_);
    }
    friend KElem operator-(const KElem& a, const KElem& b) {
        FieldPtr f = joint_field(a, b);
        return KElem(f, a.rep_ - b.rep_);
    }
    friend KElem operator*(const KElem& a, const KElem& b) {
        FieldPtr f = joint_field(a, b);
        return KElem(f, a.rep_ * b.rep_);
    }
    KElem& operator+=(const KElem& o) { return *this = *this + o; }
    KElem& operator-=(const KElem& o) { return *this = *this - o; }
    KElem& operator*=(const KElem& o) { return *this = *this * o; }

    KElem inverse() const {
        if (rep_.is_zero()) fail(ErrKind::DivisionByZero, "inverse of zero in number field");
        if (!field_) return KElem(rep_.constant().inverse());
        auto [g, s] = poly_half_xgcd(rep_, field_->modulus);
        if (g.degree() == 0) return KElem(field_, s); // g is monic, hence 1
        throw SplitError(split_on(g));
    }

    friend KElem operator/(const KElem& a, const KElem& b) { return a * b.inverse(); }

    friend bool operator==(const KElem& a, const KElem& b) { return (a - b).is_zero(); }
    friend bool operator!=(const KElem& a, const KElem& b) { return !(a == b); }

    /// Structural identity of the expansion-point payload (no zero tests).
    bool same_point_as(const KElem& o) const {
        if (static_cast<bool>(field_) != static_cast<bool>(o.field_)) return false;
        if (field_ && !(field_->modulus == o.field_->modulus)) return false;
        return rep_ == o.rep_;
    }

  private:
    FieldPtr field_; // null: plain rational
    QPoly rep_;      // degree < deg(modulus) when field_ is set

    void reduce() {
        if (field_ && rep_.degree() >= field_->modulus.degree()) rep_ = rep_.divrem(field_->modulus).second;
        if (!field_ && rep_.degree() > 0) fail(ErrKind::Internal, "nonconstant rational element");
    }

    SplitEvent split_on(const QPoly& g) const {
        return SplitEvent{field_->modulus, {g.monic(), field_->modulus.exact_div(g).monic()}};
    }

    static FieldPtr joint_field(const KElem& a, const KElem& b) {
        if (!a.field_) return b.field_;
        if (!b.field_) return a.field_;
        if (a.field_ != b.field_ && !(a.field_->modulus == b.field_->modulus))
            fail(ErrKind::PointMismatch, "number field elements from different fields");
        return a.field_;
    }
};

/// Inverse in Q[t]/<modulus>, or the discovered factorization when the
/// element is a zero divisor.
inline std::variant<KElem, SplitEvent> nf_invert(const KElem& a) {
    try {
        return a.inverse();
    } catch (const SplitError& s) {
        return s.event();
    }
}

using KPoly = UniPoly<KElem>;

inline KPoly promote(const QPoly& p, const FieldPtr& f) {
    return p.map_coeffs([&](const Rational& c) { return f ? KElem(f, QPoly(c)) : KElem(c); });
}

} // namespace ibasis
