#pragma once

#include <optional>
#include <vector>

#include "ibasis/logseries.hpp"
#include "ibasis/ratfun.hpp"

namespace ibasis {

/// Differential operator sum c_i(x) D^i with rational-function coefficients,
/// D collected to the right of the coefficients; Dx = xD + 1.
class OrePoly {
  public:
    OrePoly() = default;
    explicit OrePoly(std::vector<RatFun> coeffs) : c_(std::move(coeffs)) { trim(); }
    OrePoly(long n) : c_{RatFun(n)} { trim(); }

    static OrePoly term(RatFun coeff, int dpow) {
        std::vector<RatFun> v(static_cast<size_t>(dpow) + 1);
        v[static_cast<size_t>(dpow)] = std::move(coeff);
        return OrePoly(std::move(v));
    }
    static OrePoly d_var() { return term(RatFun(1), 1); }

    bool is_zero() const { return c_.empty(); }
    int ord_or_neg() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<RatFun>& coeffs() const { return c_; }
    RatFun coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c_.size())) return RatFun();
        return c_[static_cast<size_t>(i)];
    }
    bool is_polynomial() const {
        for (const auto& c : c_)
            if (!c.is_polynomial()) return false;
        return true;
    }

    OrePoly operator-() const {
        OrePoly r(*this);
        for (auto& c : r.c_) c = -c;
        return r;
    }
    friend OrePoly operator+(const OrePoly& a, const OrePoly& b) {
        std::vector<RatFun> v(std::max(a.c_.size(), b.c_.size()));
        for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return OrePoly(std::move(v));
    }
    friend OrePoly operator-(const OrePoly& a, const OrePoly& b) { return a + (-b); }

    /// Noncommutative product: D^i b(x) = sum binom(i,t) b^(t) D^(i-t).
    friend OrePoly operator*(const OrePoly& a, const OrePoly& b) {
        if (a.is_zero() || b.is_zero()) return OrePoly();
        int oa = a.ord_or_neg(), ob = b.ord_or_neg();
        std::vector<RatFun> v(static_cast<size_t>(oa + ob) + 1);
        for (int j = 0; j <= ob; ++j) {
            RatFun bder = b.coeff(j);
            for (int t = 0; t <= oa; ++t) {
                if (t > 0) bder = bder.derivative();
                if (bder.is_zero()) continue;
                for (int i = t; i <= oa; ++i) {
                    RatFun ai = a.coeff(i);
                    if (ai.is_zero()) continue;
                    size_t k = static_cast<size_t>(i + j - t);
                    v[k] += ai * RatFun(binomial(i, t)) * bder;
                }
            }
        }
        return OrePoly(std::move(v));
    }
    friend OrePoly operator*(const RatFun& s, const OrePoly& p) {
        OrePoly r(p);
        for (auto& c : r.c_) c = s * c;
        r.trim();
        return r;
    }
    OrePoly& operator+=(const OrePoly& o) { return *this = *this + o; }
    OrePoly& operator-=(const OrePoly& o) { return *this = *this - o; }

    friend bool operator==(const OrePoly& a, const OrePoly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const OrePoly& a, const OrePoly& b) { return !(a == b); }

  private:
    std::vector<RatFun> c_;
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
};

inline OrePoly ore_mul(const OrePoly& a, const OrePoly& b) { return a * b; }

inline int ore_order(const OrePoly& a) {
    if (a.is_zero()) fail(ErrKind::ZeroOperator, "order of the zero operator");
    return a.ord_or_neg();
}

/// Element of C(x)[D]/<L> in coordinates over the basis {1, D, ..., D^(r-1)}.
class BasisElement {
  public:
    BasisElement() = default;
    explicit BasisElement(int r) : c_(static_cast<size_t>(r)) {}
    explicit BasisElement(std::vector<RatFun> coeffs) : c_(std::move(coeffs)) {}

    int size() const { return static_cast<int>(c_.size()); }
    const std::vector<RatFun>& coeffs() const { return c_; }
    RatFun coeff(int i) const {
        if (i < 0 || i >= size()) return RatFun();
        return c_[static_cast<size_t>(i)];
    }
    RatFun& at(int i) { return c_[static_cast<size_t>(i)]; }

    bool is_zero() const {
        for (const auto& c : c_)
            if (!c.is_zero()) return false;
        return true;
    }
    int ord_or_neg() const {
        for (int i = size() - 1; i >= 0; --i)
            if (!c_[static_cast<size_t>(i)].is_zero()) return i;
        return -1;
    }

    OrePoly as_ore() const { return OrePoly(c_); }

    BasisElement operator-() const {
        BasisElement r(*this);
        for (auto& c : r.c_) c = -c;
        return r;
    }
    friend BasisElement operator+(const BasisElement& a, const BasisElement& b) {
        BasisElement r(std::max(a.size(), b.size()));
        for (int i = 0; i < r.size(); ++i) r.at(i) = a.coeff(i) + b.coeff(i);
        return r;
    }
    friend BasisElement operator-(const BasisElement& a, const BasisElement& b) { return a + (-b); }
    friend BasisElement operator*(const RatFun& s, const BasisElement& e) {
        BasisElement r(e);
        for (auto& c : r.c_) c = s * c;
        return r;
    }
    friend bool operator==(const BasisElement& a, const BasisElement& b) {
        if (a.size() != b.size()) return false;
        return a.c_ == b.c_;
    }
    friend bool operator!=(const BasisElement& a, const BasisElement& b) { return !(a == b); }

  private:
    std::vector<RatFun> c_;
};

/// Left multiplication by D inside C(x)[D]/<L>; the top power folds through
/// D^r = -(1/l_r)(l_0 + ... + l_{r-1} D^(r-1)).
inline BasisElement apply_D_mod(const OrePoly& L, const BasisElement& e) {
    int r = ore_order(L);
    BasisElement out(r);
    RatFun top; // coefficient that lands on D^r
    for (int i = 0; i < r; ++i) {
        RatFun ci = e.coeff(i);
        if (ci.is_zero()) continue;
        out.at(i) += ci.derivative();
        if (i + 1 < r)
            out.at(i + 1) += ci;
        else
            top = ci;
    }
    if (!top.is_zero()) {
        RatFun lr = L.coeff(r);
        for (int i = 0; i < r; ++i) out.at(i) -= top * L.coeff(i) / lr;
    }
    return out;
}

/// The class of D^k in C(x)[D]/<L>.
inline BasisElement reduce_pow(const OrePoly& L, int k) {
    if (k < 0) fail(ErrKind::Internal, "reduce_pow: negative power");
    int r = ore_order(L);
    BasisElement e(r);
    if (k < r) {
        e.at(k) = RatFun(1);
        return e;
    }
    e.at(r - 1) = RatFun(1);
    for (int i = r - 1; i < k; ++i) e = apply_D_mod(L, e);
    return e;
}

/// Reduction of an arbitrary operator modulo <L>.
inline BasisElement reduce_mod(const OrePoly& L, const OrePoly& p) {
    int r = ore_order(L);
    BasisElement out(r);
    if (p.is_zero()) return out;
    BasisElement pw(r);
    pw.at(0) = RatFun(1);
    for (int k = 0; k <= p.ord_or_neg(); ++k) {
        if (k > 0) pw = (k <= r - 1) ? reduce_pow(L, k) : apply_D_mod(L, pw);
        RatFun ck = p.coeff(k);
        if (!ck.is_zero()) out = out + ck * pw;
    }
    return out;
}

/// An operator prepared for application to series at a fixed point: the
/// polynomial part is tabulated as the family P_w with
///   N . x^nu = sum_w P_w(nu) x^(nu+w),
/// and the common denominator is expanded on demand.
class LocalizedOperator {
  public:
    LocalizedOperator(const OrePoly& op, KElem point) : point_(std::move(point)) {
        if (op.is_zero()) {
            zero_ = true;
            den_loc_ = KPoly(1);
            wmin_ = 0;
            return;
        }
        QPoly den(1);
        for (const auto& c : op.coeffs()) den = poly_lcm(den, c.den());
        den = den.monic();
        int r = op.ord_or_neg();
        std::vector<KPoly> num_loc(static_cast<size_t>(r) + 1);
        const FieldPtr& f = point_.field();
        for (int i = 0; i <= r; ++i) {
            RatFun ci = op.coeff(i);
            QPoly ni = ci.num() * den.exact_div(ci.den());
            num_loc[static_cast<size_t>(i)] = promote(ni, f).shifted(point_);
        }
        den_loc_ = promote(den, f).shifted(point_);

        long wmin = LONG_MAX, wmax = LONG_MIN;
        std::vector<int> val(static_cast<size_t>(r) + 1, -1);
        for (int i = 0; i <= r; ++i) {
            const KPoly& ni = num_loc[static_cast<size_t>(i)];
            if (ni.is_zero()) continue;
            int v = 0;
            while (ni.coeff(v).is_zero()) ++v;
            val[static_cast<size_t>(i)] = v;
            wmin = std::min(wmin, static_cast<long>(v - i));
            wmax = std::max(wmax, static_cast<long>(ni.degree() - i));
        }
        wmin_ = wmin;
        pw_.assign(static_cast<size_t>(wmax - wmin) + 1, KPoly());
        KPoly ff(1); // falling factorial nu(nu-1)...(nu-i+1)
        for (int i = 0; i <= r; ++i) {
            if (i > 0) ff *= KPoly(std::vector<KElem>{KElem(Rational(1 - i)), KElem(1)});
            const KPoly& ni = num_loc[static_cast<size_t>(i)];
            for (int s = 0; s <= ni.degree(); ++s) {
                KElem cs = ni.coeff(s);
                if (cs.rep().is_zero()) continue;
                long w = s - i;
                pw_[static_cast<size_t>(w - wmin_)] += cs * ff;
            }
        }
    }

    const KElem& point() const { return point_; }
    long w_min() const { return wmin_; }
    size_t w_count() const { return pw_.size(); }
    const KPoly& pw(long idx) const { return pw_.at(static_cast<size_t>(idx)); }
    const KPoly& indicial() const {
        if (zero_ || pw_.empty()) fail(ErrKind::ZeroOperator, "indicial data of the zero operator");
        return pw_.front();
    }

    /// Applies the operator; the result is known strictly below `target` in
    /// every class (subject to what the input's own truncation supports).
    LogSeries apply(const LogSeries& f, std::optional<Rational> target = std::nullopt) const {
        if (zero_) return LogSeries(point_);
        LogSeries res(point_);
        int jmax = f.max_logpow();
        // derivative chains of each P_w, up to the highest log power present
        std::vector<std::vector<KPoly>> der(pw_.size());
        for (size_t w = 0; w < pw_.size(); ++w) {
            der[w].push_back(pw_[w]);
            for (int t = 1; t <= jmax; ++t) der[w].push_back(der[w].back().derivative());
        }
        for (const auto& [k, c] : f.terms()) {
            for (size_t w = 0; w < pw_.size(); ++w) {
                for (int t = 0; t <= k.logpow; ++t) {
                    if (der[w][static_cast<size_t>(t)].is_zero()) continue;
                    KElem v = der[w][static_cast<size_t>(t)].eval(KElem(k.exp));
                    KElem coeff = KElem(binomial(k.logpow, t)) * v * c;
                    res.add_term(k.exp + Rational(wmin_ + static_cast<long>(w)), k.logpow - t, coeff);
                }
            }
        }
        for (const auto& [cls, cut] : f.trunc()) res.set_cut(cls, cut + Rational(wmin_));
        res.normalize();
        if (den_loc_.degree() == 0) return res;

        int vd = 0;
        while (den_loc_.coeff(vd).is_zero()) ++vd;
        Rational goal;
        if (target)
            goal = *target;
        else if (!res.trunc().empty()) {
            goal = res.trunc().begin()->second;
            for (const auto& [cls, cut] : res.trunc()) goal = std::max(goal, cut);
        } else if (auto mx = res.max_exp())
            goal = *mx + Rational(1);
        else
            return LogSeries(point_); // exact zero stays exact
        Rational lowest = res.min_exp() ? *res.min_exp() : goal;
        long n = (goal - lowest).floor().get_si() + vd + 2;
        if (n < 1) n = 1;

        LogSeries inv(point_);
        std::vector<KElem> b(static_cast<size_t>(n));
        KElem u0 = den_loc_.coeff(vd).inverse();
        b[0] = u0;
        for (long k2 = 1; k2 < n; ++k2) {
            KElem acc;
            for (long i = 1; i <= k2; ++i)
                acc += den_loc_.coeff(vd + static_cast<int>(i)) * b[static_cast<size_t>(k2 - i)];
            b[static_cast<size_t>(k2)] = -(u0 * acc);
        }
        for (long k2 = 0; k2 < n; ++k2) inv.add_term(Rational(k2 - vd), 0, b[static_cast<size_t>(k2)]);
        inv.set_cut(Rational(0), Rational(n - vd));
        inv.normalize();
        return res * inv;
    }

  private:
    KElem point_;
    bool zero_ = false;
    long wmin_ = 0;
    std::vector<KPoly> pw_;
    KPoly den_loc_;
};

/// B . f for an operator or algebra element applied to a local series.
inline LogSeries apply_to_series(const OrePoly& B, const LogSeries& f,
                                 std::optional<Rational> target = std::nullopt) {
    return LocalizedOperator(B, f.point()).apply(f, target);
}

inline LogSeries apply_to_series(const BasisElement& B, const LogSeries& f,
                                 std::optional<Rational> target = std::nullopt) {
    return apply_to_series(B.as_ore(), f, target);
}

} // namespace ibasis
