#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ibasis/rational.hpp"

namespace ibasis {

/// The integrality threshold function iota. It maps a residue class nu + Z
/// and a log power j to the smallest exponent in the class whose terms count
/// as integral. Only the distinction j = 0 versus j >= 1 matters; overrides
/// are keyed on that flag.
///
/// Default: representative in [0,1) for j = 0 and in (0,1] for j >= 1, the
/// restriction of the bounded-near-the-origin convention to rational
/// exponents.
class IotaPolicy {
  public:
    static IotaPolicy defaults() { return IotaPolicy(); }

    static IotaPolicy from_json_text(const std::string& text) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrKind::InvalidPolicy, std::string("iota policy: bad JSON: ") + e.what());
        }
        IotaPolicy pol;
        if (doc.contains("jmax")) {
            if (!doc["jmax"].is_number_integer() || doc["jmax"].get<long>() < 1)
                fail(ErrKind::InvalidPolicy, "iota policy: jmax must be a positive integer");
            pol.jmax_ = doc["jmax"].get<int>();
        }
        if (doc.contains("overrides")) {
            for (const auto& ov : doc["overrides"]) {
                if (!ov.contains("class") || !ov.contains("rep"))
                    fail(ErrKind::InvalidPolicy, "iota policy: override needs 'class' and 'rep'");
                Rational cls, rep;
                try {
                    cls = Rational::parse(ov["class"].get<std::string>());
                    rep = Rational::parse(ov["rep"].get<std::string>());
                } catch (const Error&) {
                    fail(ErrKind::InvalidPolicy, "iota policy: override class/rep must be rationals");
                }
                int flag = 0;
                if (ov.contains("min_logpow")) flag = ov["min_logpow"].get<int>();
                if (flag != 0 && flag != 1)
                    fail(ErrKind::InvalidPolicy, "iota policy: min_logpow must be 0 or 1");
                pol.overrides_[{cls.frac01(), flag}] = rep;
            }
        }
        pol.validate();
        return pol;
    }

    static IotaPolicy from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) fail(ErrKind::InvalidPolicy, "iota policy: cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_json_text(ss.str());
    }

    Rational eval(const Rational& cls, int j) const {
        Rational c = cls.frac01();
        int flag = j >= 1 ? 1 : 0;
        auto it = overrides_.find({c, flag});
        if (it != overrides_.end()) return it->second;
        if (flag == 1 && c.is_zero()) return Rational(1);
        return c;
    }

    /// max_j iota(cls, j); unknown terms at or above this are always integral.
    Rational max_threshold(const Rational& cls) const {
        Rational a = eval(cls, 0), b = eval(cls, 1);
        return a < b ? b : a;
    }

    int jmax() const { return jmax_; }
    bool has_overrides() const { return !overrides_.empty(); }

    /// Checks the three iota axioms. Axiom 2 is a finite check on the lattice
    /// generated by the override denominators (doubled so that off-lattice
    /// classes, which only shift the default part, are covered). Policies
    /// whose lattice exceeds denominator 64 or whose representatives leave
    /// [-1, 1] are rejected.
    void validate() const {
        if (!eval(Rational(0), 0).is_zero())
            fail(ErrKind::InvalidPolicy, "iota axiom 3 violated: iota(Z, 0) must be 0");
        mpz_class lat = 1;
        for (const auto& [key, rep] : overrides_) {
            if (!(rep - key.first).is_integer())
                fail(ErrKind::InvalidPolicy, "iota axiom 1 violated: representative not in its class");
            if (rep < Rational(-1) || rep > Rational(1))
                fail(ErrKind::InvalidPolicy, "iota policy: representatives must lie in [-1, 1]");
            lat = lcm_z(lat, key.first.den());
        }
        if (lat > 64) fail(ErrKind::InvalidPolicy, "iota policy: override denominators exceed the validation envelope");
        long n = 2 * lat.get_si();
        for (long k1 = 0; k1 < n; ++k1) {
            for (long k2 = 0; k2 < n; ++k2) {
                Rational c1(k1, n), c2(k2, n);
                for (int j1 = 0; j1 <= 1; ++j1)
                    for (int j2 = 0; j2 <= 1; ++j2) {
                        Rational lhs = eval(c1, j1) + eval(c2, j2) - eval((c1 + c2).frac01(), j1 + j2);
                        if (!lhs.is_integer() || lhs.sign() < 0)
                            fail(ErrKind::InvalidPolicy, "iota axiom 2 violated at classes " + c1.to_string() +
                                                             ", " + c2.to_string());
                    }
            }
        }
    }

  private:
    std::map<std::pair<Rational, int>, Rational> overrides_;
    int jmax_ = 16;
};

/// Def.-1 evaluation of the threshold function.
inline Rational iota_eval(const IotaPolicy& policy, const Rational& cls, int j) {
    if (j < 0) fail(ErrKind::InvalidPolicy, "iota: negative log power");
    return policy.eval(cls, j);
}

} // namespace ibasis
