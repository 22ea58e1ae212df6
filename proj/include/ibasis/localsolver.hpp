#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibasis/linalg.hpp"
#include "ibasis/oreops.hpp"
#include "ibasis/printer.hpp"

namespace ibasis {

enum class PointClass { Ordinary, RegularSingular, Irregular };

/// An expansion point given by a monic nonconstant polynomial over Q: a
/// rational point for degree one, otherwise "any root of p" computed in
/// Q[t]/<p> under dynamic evaluation.
struct Handle {
    QPoly poly;
    KElem alpha;
    std::string label;

    static Handle from_poly(QPoly p) {
        if (p.degree() < 1) fail(ErrKind::Internal, "point handle needs a nonconstant polynomial");
        p = p.monic();
        Handle h;
        h.poly = p;
        if (p.degree() == 1) {
            Rational a = -p.coeff(0);
            h.alpha = KElem(a);
            h.label = a.to_string();
        } else {
            auto f = NumberField::make(p);
            h.alpha = KElem::generator(f);
            h.label = "root of " + poly_to_string(p, "t");
        }
        return h;
    }
    static Handle rational(Rational a) {
        return from_poly(QPoly(std::vector<Rational>{-a, Rational(1)}));
    }
    int degree() const { return poly.degree(); }
};

inline void require_operator_input(const OrePoly& L) {
    if (L.is_zero() || !L.is_polynomial())
        fail(ErrKind::NotAnOperator, "operator must be nonzero with polynomial coefficients");
}

inline void require_positive_order(const OrePoly& L) {
    require_operator_input(L);
    if (L.ord_or_neg() < 1) fail(ErrKind::NotAnOperator, "operator order must be at least one");
}

/// Coefficient of the lowest (x-alpha)-power of L.(x-alpha)^nu, as a
/// polynomial in nu over Q(alpha).
inline KPoly indicial_polynomial(const OrePoly& L, const Handle& h) {
    require_operator_input(L);
    return LocalizedOperator(L, h.alpha).indicial();
}

inline PointClass classify_point(const OrePoly& L, const Handle& h) {
    require_operator_input(L);
    int r = ore_order(L);
    KElem lead = promote(L.coeff(r).num(), h.alpha.field()).eval(h.alpha);
    if (!lead.is_zero()) return PointClass::Ordinary;
    KPoly ind = indicial_polynomial(L, h);
    return ind.degree() == r ? PointClass::RegularSingular : PointClass::Irregular;
}

namespace detail {

/// Rational roots (with multiplicity) of a polynomial over Q(alpha),
/// uniformly across the conjugates of alpha. Non-uniform root sets surface
/// as SplitError through the zero tests.
inline std::vector<std::pair<Rational, int>> rational_roots_k(const KPoly& p, const FieldPtr& field) {
    if (p.is_zero()) fail(ErrKind::Internal, "rational_roots_k: zero polynomial");
    if (!field) {
        QPoly q = p.map_coeffs([](const KElem& c) { return c.as_rational(); });
        return rational_roots(q);
    }
    KPoly cur = p;
    // Pull out any content in t; it is either a unit (harmless) or reveals
    // a factor of the modulus.
    QPoly content;
    for (int d = 0; d <= cur.degree(); ++d) content = poly_gcd(content, cur.coeff(d).rep());
    if (content.degree() >= 1) {
        QPoly g = poly_gcd(content, field->modulus);
        if (g.degree() >= 1)
            throw SplitError(SplitEvent{field->modulus, {g, field->modulus.exact_div(g).monic()}});
        KElem unit_inv = KElem(field, content).inverse();
        cur = cur.map_coeffs([&](const KElem& c) { return unit_inv * c; });
    }
    // Bivariate view A(nu, t): a_e in Q[nu] is the coefficient of t^e.
    int dt = 0;
    for (int d = 0; d <= cur.degree(); ++d) dt = std::max(dt, cur.coeff(d).rep().degree());
    std::vector<Rational> cand;
    if (dt == 0) {
        QPoly a0 = cur.map_coeffs([](const KElem& c) { return c.rep().constant(); });
        for (const auto& [root, mult] : rational_roots(a0)) cand.push_back(root);
    } else {
        std::vector<QPoly> a(static_cast<size_t>(dt) + 1);
        for (int d = 0; d <= cur.degree(); ++d)
            for (int e = 0; e <= dt; ++e)
                a[static_cast<size_t>(e)] += Rational(cur.coeff(d).rep().coeff(e)) *
                                             QPoly::monomial(Rational(1), d);
        const QPoly& m = field->modulus;
        int dm = m.degree();
        size_t n = static_cast<size_t>(dt + dm);
        Mat<QPoly> syl(n, Vec<QPoly>(n));
        for (int i = 0; i < dm; ++i)
            for (int e = 0; e <= dt; ++e) syl[static_cast<size_t>(i)][static_cast<size_t>(i + e)] = a[static_cast<size_t>(dt - e)];
        for (int i = 0; i < dt; ++i)
            for (int e = 0; e <= dm; ++e)
                syl[static_cast<size_t>(dm + i)][static_cast<size_t>(i + e)] = QPoly(m.coeff(dm - e));
        QPoly res = det_bareiss(syl);
        if (res.is_zero()) fail(ErrKind::Internal, "vanishing resultant after content removal");
        for (const auto& [root, mult] : rational_roots(res)) cand.push_back(root);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<std::pair<Rational, int>> out;
    for (const auto& v : cand) {
        int mult = 0;
        while (cur.degree() >= 1 && cur.eval(KElem(v)).is_zero()) {
            KPoly lin(std::vector<KElem>{KElem(-v), KElem(1)});
            cur = cur.divrem(lin).first;
            ++mult;
        }
        if (mult > 0) out.emplace_back(v, mult);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct FrobeniusClass {
    Rational numin;
    std::map<long, int> resonance; // level offset -> root multiplicity
    int count = 0;                 // solutions contributed by this class
    long kres = 0;                 // highest resonant level
};

// Linear forms over the free parameters introduced at resonant levels.
using LinForm = std::vector<KElem>;

inline void form_add_scaled(LinForm& dst, const LinForm& src, const KElem& f) {
    if (dst.size() < src.size()) dst.resize(src.size());
    for (size_t i = 0; i < src.size(); ++i) dst[i] += f * src[i];
}

inline bool form_trivial(const LinForm& f) {
    for (const auto& c : f)
        if (!c.definitely_zero()) return false;
    return true;
}

struct ClassSolution {
    // coefficient values per solution: c[solution][level][logpow]
    std::vector<std::vector<std::vector<KElem>>> c;
    int J = 0;
};

/// Solves one congruence class of exponents to `levels` coefficient levels
/// by propagating linear forms through the recurrence and resolving the
/// resonance constraints at the end. Returns nullopt when the ansatz log
/// degree J was too small.
inline std::optional<ClassSolution> solve_class(const LocalizedOperator& lop, const FrobeniusClass& cls,
                                                long levels, int J) {
    const long M = std::max(levels - 1, cls.kres);
    const long wspan = static_cast<long>(lop.w_count()) - 1;
    // derivative chains of every P_w up to the ansatz log degree
    std::vector<std::vector<KPoly>> der(static_cast<size_t>(wspan) + 1);
    for (long w = 0; w <= wspan; ++w) {
        der[static_cast<size_t>(w)].push_back(lop.pw(w));
        for (int t = 1; t <= J; ++t)
            der[static_cast<size_t>(w)].push_back(der[static_cast<size_t>(w)].back().derivative());
    }
    auto pwt = [&](long widx, int t, const Rational& nu) -> KElem {
        if (widx < 0 || widx > wspan || t > J) return KElem();
        return der[static_cast<size_t>(widx)][static_cast<size_t>(t)].eval(KElem(nu));
    };

    size_t np = 0;
    std::vector<std::vector<LinForm>> coeff(static_cast<size_t>(M) + 1,
                                            std::vector<LinForm>(static_cast<size_t>(J) + 1));
    std::vector<LinForm> constraints;

    for (long m = 0; m <= M; ++m) {
        Rational num = cls.numin + Rational(m);
        std::vector<LinForm> rhs(static_cast<size_t>(J) + 1);
        for (long k = std::max(0L, m - wspan); k < m; ++k) {
            Rational nuk = cls.numin + Rational(k);
            long widx = m - k;
            for (int j = 0; j <= J; ++j) {
                const LinForm& src = coeff[static_cast<size_t>(k)][static_cast<size_t>(j)];
                if (form_trivial(src)) continue;
                for (int t = 0; t <= j; ++t) {
                    KElem v = pwt(widx, t, nuk);
                    if (v.definitely_zero()) continue;
                    form_add_scaled(rhs[static_cast<size_t>(j - t)], src, KElem(binomial(j, t)) * v);
                }
            }
        }
        int mult = 0;
        if (auto it = cls.resonance.find(m); it != cls.resonance.end()) mult = it->second;
        // new free parameters for the low log powers
        for (int j = 0; j < std::min(mult, J + 1); ++j) {
            LinForm f(np + 1);
            f[np] = KElem(1);
            ++np;
            coeff[static_cast<size_t>(m)][static_cast<size_t>(j)] = std::move(f);
        }
        for (int jp = J; jp >= 0; --jp) {
            if (jp + mult > J) {
                if (!form_trivial(rhs[static_cast<size_t>(jp)]))
                    constraints.push_back(rhs[static_cast<size_t>(jp)]);
                continue;
            }
            LinForm acc = rhs[static_cast<size_t>(jp)];
            for (int t = mult + 1; jp + t <= J; ++t) {
                KElem v = pwt(0, t, num);
                if (v.definitely_zero()) continue;
                form_add_scaled(acc, coeff[static_cast<size_t>(m)][static_cast<size_t>(jp + t)],
                                KElem(binomial(jp + t, t)) * v);
            }
            KElem pivot = KElem(binomial(jp + mult, mult)) * pwt(0, mult, num);
            KElem pinv = pivot.inverse();
            LinForm sol;
            form_add_scaled(sol, acc, -pinv);
            coeff[static_cast<size_t>(m)][static_cast<size_t>(jp + mult)] = std::move(sol);
        }
    }

    // Resolve the accumulated constraints on the parameters.
    std::vector<Vec<KElem>> basis;
    if (constraints.empty()) {
        for (size_t p = 0; p < np; ++p) {
            Vec<KElem> v(np);
            v[p] = KElem(1);
            basis.push_back(std::move(v));
        }
    } else {
        Mat<KElem> cm(constraints.size(), Vec<KElem>(np));
        for (size_t i = 0; i < constraints.size(); ++i)
            for (size_t p = 0; p < constraints[i].size(); ++p) cm[i][p] = constraints[i][p];
        basis = nullspace(cm);
    }
    if (static_cast<int>(basis.size()) < cls.count) return std::nullopt;
    if (static_cast<int>(basis.size()) > cls.count)
        fail(ErrKind::Internal, "solution space larger than the class multiplicity");

    ClassSolution out;
    out.J = J;
    for (const auto& pv : basis) {
        std::vector<std::vector<KElem>> vals(static_cast<size_t>(M) + 1,
                                             std::vector<KElem>(static_cast<size_t>(J) + 1));
        for (long m = 0; m <= M; ++m)
            for (int j = 0; j <= J; ++j) {
                const LinForm& f = coeff[static_cast<size_t>(m)][static_cast<size_t>(j)];
                KElem acc;
                for (size_t p = 0; p < f.size(); ++p) acc += f[p] * pv[p];
                vals[static_cast<size_t>(m)][static_cast<size_t>(j)] = acc;
            }
        out.c.push_back(std::move(vals));
    }
    return out;
}

} // namespace detail

/// One truncated local solution together with its leading data.
struct LocalSolution {
    LogSeries series;
    Rational nu;  // leading exponent
    int logdeg;   // observed log degree of the solution
};

struct LocalBasis {
    std::vector<LocalSolution> sols;
    long levels; // coefficient levels computed per class
};

/// Truncated fundamental system at the handle, echelon-normalised per
/// exponent class. `levels` is the number of coefficient levels computed
/// beyond each class's smallest exponent.
inline LocalBasis solve_fundamental(const OrePoly& L, const Handle& h, long levels) {
    require_positive_order(L);
    int r = ore_order(L);
    PointClass pc = classify_point(L, h);
    if (pc == PointClass::Irregular)
        fail(ErrKind::IrregularSingularity, "irregular singular point at " + h.label);
    LocalizedOperator lop(L, h.alpha);
    auto roots = detail::rational_roots_k(lop.indicial(), h.alpha.field());
    int total = 0;
    for (const auto& [root, mult] : roots) total += mult;
    if (total < r)
        fail(ErrKind::UnsupportedExponent,
             "local exponents at " + h.label + " are not all rational");

    // group into congruence classes mod 1
    std::map<Rational, detail::FrobeniusClass> classes;
    for (const auto& [root, mult] : roots) {
        Rational cls = root.frac01();
        auto it = classes.find(cls);
        if (it == classes.end()) {
            detail::FrobeniusClass fc;
            fc.numin = root;
            classes.emplace(cls, std::move(fc));
        } else if (root < it->second.numin) {
            it->second.numin = root;
        }
    }
    for (const auto& [root, mult] : roots) {
        auto& fc = classes.at(root.frac01());
        long off = (root - fc.numin).to_long();
        fc.resonance[off] = mult;
        fc.count += mult;
        fc.kres = std::max(fc.kres, off);
    }

    LocalBasis out;
    out.levels = levels;
    for (auto& [cls, fc] : classes) {
        int J = fc.count - 1;
        std::optional<detail::ClassSolution> sol;
        while (true) {
            sol = detail::solve_class(lop, fc, levels, J);
            if (sol) break;
            if (++J > r - 1)
                fail(ErrKind::Internal, "class solution space did not reach its multiplicity");
        }
        long M = std::max(levels - 1, fc.kres);
        // canonical echelon form over positions ordered by (level, logpow)
        size_t ncols = static_cast<size_t>(M + 1) * static_cast<size_t>(sol->J + 1);
        Mat<KElem> rows(sol->c.size(), Vec<KElem>(ncols));
        for (size_t s = 0; s < sol->c.size(); ++s)
            for (long m = 0; m <= M; ++m)
                for (int j = 0; j <= sol->J; ++j)
                    rows[s][static_cast<size_t>(m) * (sol->J + 1) + static_cast<size_t>(j)] =
                        sol->c[s][static_cast<size_t>(m)][static_cast<size_t>(j)];
        auto pivots = detail::rref(rows);
        if (pivots.size() != sol->c.size())
            fail(ErrKind::Internal, "dependent class solutions after echelonisation");
        for (size_t s = 0; s < rows.size(); ++s) {
            LocalSolution ls;
            long pk = pivots[s] / (sol->J + 1);
            ls.nu = fc.numin + Rational(pk);
            ls.series = LogSeries(h.alpha);
            int dmax = 0;
            for (long m = 0; m <= M; ++m)
                for (int j = 0; j <= sol->J; ++j) {
                    const KElem& v = rows[s][static_cast<size_t>(m) * (sol->J + 1) + static_cast<size_t>(j)];
                    if (v.definitely_zero()) continue;
                    ls.series.add_term(fc.numin + Rational(m), j, v);
                }
            ls.series.set_cut(cls, fc.numin + Rational(M + 1));
            ls.series.normalize();
            for (const auto& [key, v] : ls.series.terms()) dmax = std::max(dmax, key.logpow);
            ls.logdeg = dmax;
            out.sols.push_back(std::move(ls));
        }
    }
    std::stable_sort(out.sols.begin(), out.sols.end(), [](const LocalSolution& a, const LocalSolution& b) {
        if (a.nu != b.nu) return a.nu < b.nu;
        return a.logdeg < b.logdeg;
    });
    return out;
}

/// Fundamental system at the handle: r linearly independent truncated
/// solutions.
inline std::vector<LogSeries> fundamental_system(const OrePoly& L, const Handle& h, long levels) {
    auto basis = solve_fundamental(L, h, levels);
    std::vector<LogSeries> out;
    for (auto& s : basis.sols) out.push_back(std::move(s.series));
    return out;
}

/// Determinant of a square matrix of series by cofactor expansion; sizes
/// here are the operator order.
inline LogSeries det_series(const std::vector<std::vector<LogSeries>>& m) {
    size_t n = m.size();
    if (n == 0) fail(ErrKind::ShapeMismatch, "empty series determinant");
    if (n == 1) return m[0][0];
    LogSeries acc(m[0][0].point());
    for (size_t col = 0; col < n; ++col) {
        std::vector<std::vector<LogSeries>> minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<LogSeries> row;
            for (size_t j = 0; j < n; ++j)
                if (j != col) row.push_back(m[i][j]);
            minor.push_back(std::move(row));
        }
        LogSeries term = m[0][col] * det_series(minor);
        acc = (col % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

/// Classical Wronskian matrix (D^j t_i) of the given solutions.
inline std::vector<std::vector<LogSeries>> wronskian_matrix(const std::vector<LogSeries>& sols) {
    std::vector<std::vector<LogSeries>> m;
    for (const auto& s : sols) {
        std::vector<LogSeries> row{s};
        for (size_t j = 1; j < sols.size(); ++j) row.push_back(row.back().derivative());
        m.push_back(std::move(row));
    }
    return m;
}

/// Generalized Wronskian det(B_i . b_j) at the handle.
inline LogSeries generalized_wronskian(const OrePoly& L, const Handle& h,
                                       const std::vector<BasisElement>& bs, long levels = 8) {
    auto sols = fundamental_system(L, h, levels);
    std::vector<std::vector<LogSeries>> m;
    for (const auto& b : bs) {
        std::vector<LogSeries> row;
        for (const auto& s : sols) row.push_back(apply_to_series(b, s));
        m.push_back(std::move(row));
    }
    return det_series(m);
}

struct BoundsOptions {
    long max_wronskian_levels = 512;
    int trunc_multiplier = 1; // robustness experiments scale every N_i
};

/// Per-point local data: exponents, log degrees, the Wronskian valuation
/// offset m, the truncation orders N_i, and the truncated solutions t_i
/// (exact finite series per the bounds guarantee).
struct LocalData {
    Handle handle;
    PointClass pclass = PointClass::Ordinary;
    std::vector<Rational> nu;
    std::vector<int> logdeg;
    long m = 0;
    std::vector<long> N;
    std::vector<LogSeries> tsols;
    long solved_levels = 0;
};

namespace detail {

inline std::pair<long, LocalBasis> wronskian_offset(const OrePoly& L, const Handle& h, long start_levels,
                                                    long max_levels) {
    int r = ore_order(L);
    long levels = std::max(start_levels, static_cast<long>(r));
    while (true) {
        LocalBasis basis = solve_fundamental(L, h, levels);
        std::vector<LogSeries> sols;
        for (const auto& s : basis.sols) sols.push_back(s.series);
        LogSeries w = det_series(wronskian_matrix(sols));
        if (auto lo = w.min_exp()) {
            Rational sum(0);
            for (const auto& s : basis.sols) sum += s.nu;
            Rational moff = *lo - (sum - Rational(static_cast<long>(r) * (r - 1) / 2, 1));
            if (!moff.is_integer() || moff.sign() < 0)
                fail(ErrKind::Internal, "Wronskian valuation offset is not a nonnegative integer");
            return {moff.to_long(), std::move(basis)};
        }
        if (levels >= max_levels)
            fail(ErrKind::CannotBoundWronskian,
                 "Wronskian valuation not visible within " + std::to_string(max_levels) +
                     " series terms at " + h.label);
        levels *= 2;
    }
}

} // namespace detail

/// The unique m >= 0 with det(W_b) starting at sum(nu_i) - r(r-1)/2 + m.
inline long wronskian_valuation_m(const OrePoly& L, const Handle& h, long max_levels = 512) {
    return detail::wronskian_offset(L, h, 4, max_levels).first;
}

/// Computes the truncation orders N_i of the local solutions so that
/// integrality of B.t_i decides integrality of B.b_i for every element B of
/// the quotient algebra, and returns the solutions truncated accordingly.
inline LocalData truncation_bounds(const OrePoly& L, const Handle& h, const IotaPolicy& pol,
                                   const BoundsOptions& opt = {}) {
    int r = ore_order(L);
    auto [m, basis] = detail::wronskian_offset(L, h, 4, opt.max_wronskian_levels);
    LocalData out;
    out.handle = h;
    out.pclass = classify_point(L, h);
    out.m = m;
    for (const auto& s : basis.sols) {
        out.nu.push_back(s.nu);
        out.logdeg.push_back(s.logdeg);
    }
    for (int i = 0; i < r; ++i) {
        long best = 0; // j = i, k = 0 contributes 0
        for (int j = 0; j < r; ++j) {
            Rational diff = out.nu[static_cast<size_t>(i)] - out.nu[static_cast<size_t>(j)];
            for (int k = 0; k < out.logdeg[static_cast<size_t>(i)] + r; ++k) {
                Rational v = pol.eval(diff, k) - diff;
                if (!v.is_integer()) fail(ErrKind::Internal, "truncation bound is not an integer");
                best = std::max(best, v.to_long());
            }
        }
        out.N.push_back((m + best) * opt.trunc_multiplier);
    }
    // re-solve deep enough that every t_i holds all levels up to nu_i + N_i
    std::map<Rational, Rational> numin;
    for (const auto& v : out.nu) {
        auto it = numin.find(v.frac01());
        if (it == numin.end())
            numin.emplace(v.frac01(), v);
        else if (v < it->second)
            it->second = v;
    }
    long levels = basis.levels;
    for (size_t i = 0; i < out.nu.size(); ++i)
        levels = std::max(levels, (out.nu[i] - numin.at(out.nu[i].frac01())).to_long() + out.N[i] + 1);
    if (levels > basis.levels) basis = solve_fundamental(L, h, levels);
    out.solved_levels = basis.levels;
    for (size_t i = 0; i < basis.sols.size(); ++i) {
        Rational bound = out.nu[i] + Rational(out.N[i]);
        out.tsols.push_back(basis.sols[i].series.prefix_through(bound));
    }
    // independence of the truncated system: the coefficient matrix over the
    // first distinct positions must have full rank
    {
        std::map<SeriesKey, size_t> cols;
        for (const auto& t : out.tsols)
            for (const auto& [k, c] : t.terms())
                if (!cols.count(k)) {
                    size_t id = cols.size();
                    cols[k] = id;
                }
        Mat<KElem> mm(out.tsols.size(), Vec<KElem>(cols.size()));
        for (size_t i = 0; i < out.tsols.size(); ++i)
            for (const auto& [k, c] : out.tsols[i].terms()) mm[i][cols[k]] = c;
        if (rank(mm) != r) fail(ErrKind::Internal, "truncated solutions are linearly dependent");
    }
    return out;
}

/// Definition "locally integral at alpha": a full fundamental system exists
/// and all its members are integral.
inline bool is_locally_integral(const OrePoly& L, const Handle& h, const IotaPolicy& pol) {
    require_operator_input(L);
    if (classify_point(L, h) == PointClass::Irregular) return false;
    LocalData data = truncation_bounds(L, h, pol);
    for (const auto& t : data.tsols)
        if (!is_integral(t, pol)) return false;
    return true;
}

} // namespace ibasis
