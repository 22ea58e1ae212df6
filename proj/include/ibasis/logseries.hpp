#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <optional>

#include "ibasis/iota.hpp"
#include "ibasis/numberfield.hpp"
#include "ibasis/ratfun.hpp"

namespace ibasis {

struct SeriesKey {
    Rational exp;
    int logpow = 0;
    friend bool operator<(const SeriesKey& a, const SeriesKey& b) {
        if (a.exp != b.exp) return a.exp < b.exp;
        return a.logpow < b.logpow;
    }
    friend bool operator==(const SeriesKey& a, const SeriesKey& b) {
        return a.exp == b.exp && a.logpow == b.logpow;
    }
};

/// Truncated generalized series at a point alpha:
///   sum of c * (x-alpha)^mu * log(x-alpha)^j
/// with rational exponents and coefficients in Q(alpha). Knowledge is
/// tracked per residue class mu mod 1: terms with mu >= trunc[class] are
/// unknown; a class with no entry is known exactly.
class LogSeries {
  public:
    LogSeries() = default;
    explicit LogSeries(KElem point) : point_(std::move(point)) {}

    static LogSeries monomial(KElem point, Rational exp, int logpow, KElem coeff) {
        LogSeries s(std::move(point));
        s.add_term(std::move(exp), logpow, std::move(coeff));
        s.normalize();
        return s;
    }

    const KElem& point() const { return point_; }
    const std::map<SeriesKey, KElem>& terms() const { return terms_; }
    const std::map<Rational, Rational>& trunc() const { return trunc_; }

    bool is_exact() const { return trunc_.empty(); }
    bool has_terms() const { return !terms_.empty(); }

    std::optional<Rational> min_exp() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.begin()->first.exp;
    }
    std::optional<Rational> max_exp() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.rbegin()->first.exp;
    }
    int max_logpow() const {
        int m = 0;
        for (const auto& [k, c] : terms_) m = std::max(m, k.logpow);
        return m;
    }

    std::optional<Rational> cut_for_class(const Rational& cls) const {
        auto it = trunc_.find(cls.frac01());
        if (it == trunc_.end()) return std::nullopt;
        return it->second;
    }

    /// Whether the coefficient at (exp, logpow) is determined.
    bool is_known(const Rational& exp) const {
        auto cut = cut_for_class(exp);
        return !cut || exp < *cut;
    }

    KElem coeff_at(const Rational& exp, int logpow) const {
        auto it = terms_.find(SeriesKey{exp, logpow});
        return it == terms_.end() ? KElem() : it->second;
    }

    void add_term(Rational exp, int logpow, KElem coeff) {
        SeriesKey k{std::move(exp), logpow};
        auto it = terms_.find(k);
        if (it == terms_.end())
            terms_.emplace(std::move(k), std::move(coeff));
        else
            it->second += coeff;
    }

    void set_cut(const Rational& cls, const Rational& cut) {
        Rational c = cls.frac01();
        auto it = trunc_.find(c);
        if (it == trunc_.end())
            trunc_.emplace(c, cut);
        else if (cut < it->second)
            it->second = cut;
    }

    /// Drops zero coefficients and terms at or beyond their class cut.
    void normalize() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            auto cut = cut_for_class(it->first.exp);
            if ((cut && it->first.exp >= *cut) || it->second.is_zero())
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    /// Keeps terms with exponent <= bound and forgets all truncation marks;
    /// the result is an exact finite series.
    LogSeries prefix_through(const Rational& bound) const {
        LogSeries r(point_);
        for (const auto& [k, c] : terms_)
            if (k.exp <= bound) r.terms_.emplace(k, c);
        return r;
    }

    LogSeries operator-() const {
        LogSeries r(*this);
        for (auto& [k, c] : r.terms_) c = -c;
        return r;
    }

    friend LogSeries operator+(const LogSeries& a, const LogSeries& b) {
        a.check_point(b);
        LogSeries r(a.point_.field() ? a.point_ : b.point_);
        r.trunc_ = a.trunc_;
        for (const auto& [c, t] : b.trunc_) r.set_cut(c, t);
        r.terms_ = a.terms_;
        for (const auto& [k, c] : b.terms_) r.add_term(k.exp, k.logpow, c);
        r.normalize();
        return r;
    }
    friend LogSeries operator-(const LogSeries& a, const LogSeries& b) { return a + (-b); }

    friend LogSeries operator*(const KElem& s, const LogSeries& f) {
        if (s.is_zero()) return LogSeries(f.point_);
        LogSeries r(f);
        for (auto& [k, c] : r.terms_) c = s * c;
        r.normalize();
        return r;
    }

    friend LogSeries operator*(const LogSeries& a, const LogSeries& b) {
        a.check_point(b);
        LogSeries r(a.point_.field() ? a.point_ : b.point_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) r.add_term(ka.exp + kb.exp, ka.logpow + kb.logpow, ca * cb);
        auto amin = a.class_min_exps();
        auto bmin = b.class_min_exps();
        for (const auto& [c1, t1] : a.trunc_) {
            for (const auto& [c2, m2] : bmin) r.set_cut((c1 + c2).frac01(), t1 + m2);
            for (const auto& [c2, t2] : b.trunc_) r.set_cut((c1 + c2).frac01(), t1 + t2);
        }
        for (const auto& [c2, t2] : b.trunc_)
            for (const auto& [c1, m1] : amin) r.set_cut((c1 + c2).frac01(), m1 + t2);
        r.normalize();
        return r;
    }

    /// Multiplication by (x-alpha)^e.
    LogSeries shift_exp(const Rational& e) const {
        LogSeries r(point_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(SeriesKey{k.exp + e, k.logpow}, c);
        for (const auto& [c, t] : trunc_) r.trunc_.emplace((c + e).frac01(), t + e);
        return r;
    }

    LogSeries derivative() const {
        LogSeries r(point_);
        for (const auto& [k, c] : terms_) {
            r.add_term(k.exp - Rational(1), k.logpow, KElem(k.exp) * c);
            if (k.logpow >= 1) r.add_term(k.exp - Rational(1), k.logpow - 1, KElem(Rational(k.logpow)) * c);
        }
        for (const auto& [c, t] : trunc_) r.set_cut(c, t - Rational(1));
        r.normalize();
        return r;
    }

    friend bool operator==(const LogSeries& a, const LogSeries& b) {
        if (!a.point_.same_point_as(b.point_)) return false;
        if (a.trunc_ != b.trunc_) return false;
        if (a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        auto ib = b.terms_.begin();
        for (; ia != a.terms_.end(); ++ia, ++ib) {
            if (!(ia->first == ib->first)) return false;
            if (!(ia->second.rep() == ib->second.rep())) return false;
        }
        return true;
    }
    friend bool operator!=(const LogSeries& a, const LogSeries& b) { return !(a == b); }

    std::map<Rational, Rational> class_min_exps() const {
        std::map<Rational, Rational> m;
        for (const auto& [k, c] : terms_) {
            Rational cls = k.exp.frac01();
            auto it = m.find(cls);
            if (it == m.end())
                m.emplace(cls, k.exp);
            else if (k.exp < it->second)
                it->second = k.exp;
        }
        return m;
    }

  private:
    KElem point_;
    std::map<SeriesKey, KElem> terms_;
    std::map<Rational, Rational> trunc_;

    void check_point(const LogSeries& o) const {
        bool a_triv = !point_.field() && terms_.empty() && trunc_.empty();
        bool b_triv = !o.point_.field() && o.terms_.empty() && o.trunc_.empty();
        if (a_triv || b_triv) return;
        if (!point_.same_point_as(o.point_))
            fail(ErrKind::PointMismatch, "series expanded at different points");
    }
};

inline LogSeries series_add(const LogSeries& f, const LogSeries& g) { return f + g; }
inline LogSeries series_mul(const LogSeries& f, const LogSeries& g) { return f * g; }

/// Exact series of a polynomial at the given point (finite, no truncation).
inline LogSeries polynomial_series(const QPoly& p, const KElem& point) {
    LogSeries s(point);
    KPoly loc = promote(p, point.field()).shifted(point);
    for (int i = 0; i <= loc.degree(); ++i) s.add_term(Rational(i), 0, loc.coeff(i));
    s.normalize();
    return s;
}

/// Laurent expansion of q at the point, n terms beyond its valuation.
inline LogSeries rational_expansion(const RatFun& q, const KElem& point, long n) {
    LogSeries s(point);
    if (q.is_zero()) return s;
    KPoly num = promote(q.num(), point.field()).shifted(point);
    KPoly den = promote(q.den(), point.field()).shifted(point);
    int vn = 0, vd = 0;
    while (num.coeff(vn).is_zero()) ++vn;
    while (den.coeff(vd).is_zero()) ++vd;
    long base = vn - vd;
    if (n > 0) {
        // Power-series inverse of the unit part of the denominator.
        std::vector<KElem> inv(static_cast<size_t>(n));
        KElem u0 = den.coeff(vd).inverse();
        inv[0] = u0;
        for (long k = 1; k < n; ++k) {
            KElem acc;
            for (long i = 1; i <= k; ++i) acc += den.coeff(vd + static_cast<int>(i)) * inv[static_cast<size_t>(k - i)];
            inv[static_cast<size_t>(k)] = -(u0 * acc);
        }
        for (long k = 0; k < n; ++k) {
            KElem acc;
            for (long i = 0; i <= k; ++i) acc += num.coeff(vn + static_cast<int>(i)) * inv[static_cast<size_t>(k - i)];
            s.add_term(Rational(base + k), 0, acc);
        }
    }
    s.set_cut(Rational(0), Rational(base + n));
    s.normalize();
    return s;
}

/// Def.-1 integrality with respect to the policy. Truncated classes must be
/// known up to the threshold for the log powers the series carries;
/// otherwise TruncationTooShort.
inline bool is_integral(const LogSeries& f, const IotaPolicy& policy) {
    int jmax = f.max_logpow();
    for (const auto& [cls, cut] : f.trunc()) {
        Rational thr = policy.eval(cls, 0);
        if (jmax >= 1) thr = std::max(thr, policy.eval(cls, jmax));
        if (cut < thr)
            fail(ErrKind::TruncationTooShort,
                 "series truncated at " + cut.to_string() + " in class " + cls.to_string() +
                     ": integrality undecidable");
    }
    for (const auto& [k, c] : f.terms()) {
        if (k.exp - policy.eval(k.exp, k.logpow) < Rational(0)) return false;
    }
    return true;
}

/// Smallest integer e such that (x-alpha)^e * f is integral; negative when f
/// vanishes to high order. defect(0) = 0 by convention.
inline long series_defect(const LogSeries& f, const IotaPolicy& policy) {
    long e = LONG_MIN;
    for (const auto& [k, c] : f.terms()) {
        Rational d = policy.eval(k.exp, k.logpow) - k.exp;
        if (!d.is_integer()) fail(ErrKind::Internal, "defect: iota left the residue class");
        e = std::max(e, d.to_long());
    }
    for (const auto& [cls, cut] : f.trunc()) {
        Rational bound = policy.max_threshold(cls) - cut; // best an unknown term could add
        if (e == LONG_MIN || bound > Rational(e))
            fail(ErrKind::TruncationTooShort, "series truncated too early to bound the defect");
    }
    return e == LONG_MIN ? 0 : e;
}

} // namespace ibasis
