#pragma once

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "ibasis/localsolver.hpp"

namespace ibasis {

struct IntegralBasis {
    OrePoly L;
    std::vector<BasisElement> elements; // ord(elements[d]) = d, canonically scaled
};

struct RefinementEvent {
    int stage = 0;
    std::string point;
    long n_before = 0;
    long n_after = 0;
};

struct PointDiagnostics {
    std::string label;
    std::vector<Rational> nu;
    std::vector<int> logdeg;
    long m = 0;
    std::vector<long> N;
};

struct ClosureOptions {
    BoundsOptions bounds;
    int jobs = 1;
    bool verify_output = true;
};

struct ClosureResult {
    IntegralBasis basis;
    std::vector<PointDiagnostics> points;
    std::vector<RefinementEvent> trace;
};

namespace detail {

struct PointCtx {
    QPoly p;
    Handle h;
    LocalData data;
};

// Deterministic handle order: degree first, then coefficients; the sign is
// flipped so that linear handles x - a come out with roots ascending.
inline bool poly_before(const QPoly& a, const QPoly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (int i = a.degree(); i >= 0; --i) {
        if (a.coeff(i) != b.coeff(i)) return -a.coeff(i) < -b.coeff(i);
    }
    return false;
}

/// Local data for every root of the given handle polynomial, with modulus
/// splits resolved by refining the handle.
inline std::vector<PointCtx> resolve_point(const OrePoly& L, QPoly p, const IotaPolicy& pol,
                                           const BoundsOptions& bopt) {
    std::vector<PointCtx> out;
    std::vector<QPoly> work{std::move(p)};
    while (!work.empty()) {
        QPoly q = std::move(work.back());
        work.pop_back();
        try {
            Handle h = Handle::from_poly(q);
            LocalData data = truncation_bounds(L, h, pol, bopt);
            out.push_back(PointCtx{q, std::move(h), std::move(data)});
        } catch (const SplitError& s) {
            for (const auto& f : s.event().factors) work.push_back(f);
        }
    }
    std::sort(out.begin(), out.end(), [](const PointCtx& a, const PointCtx& b) { return poly_before(a.p, b.p); });
    return out;
}

inline std::vector<PointCtx> resolve_points(const OrePoly& L, const std::vector<QPoly>& handles,
                                            const IotaPolicy& pol, const ClosureOptions& opt) {
    std::vector<PointCtx> pts;
    if (opt.jobs > 1 && handles.size() > 1) {
        std::vector<std::future<std::vector<PointCtx>>> futs;
        for (const auto& p : handles)
            futs.push_back(std::async(std::launch::async,
                                      [&, p]() { return resolve_point(L, p, pol, opt.bounds); }));
        for (auto& f : futs)
            for (auto& ctx : f.get()) pts.push_back(std::move(ctx));
    } else {
        for (const auto& p : handles)
            for (auto& ctx : resolve_point(L, p, pol, opt.bounds)) pts.push_back(std::move(ctx));
    }
    std::sort(pts.begin(), pts.end(), [](const PointCtx& a, const PointCtx& b) { return poly_before(a.p, b.p); });
    return pts;
}

inline std::vector<QPoly> leading_handles(const OrePoly& L) {
    int r = ore_order(L);
    QPoly lr = L.coeff(r).num();
    std::vector<QPoly> handles;
    if (lr.degree() >= 1)
        for (const auto& [f, mult] : squarefree_decomposition(lr)) handles.push_back(f);
    return handles;
}

inline BasisElement b0_from_points(int r, const std::vector<PointCtx>& pts, const IotaPolicy& pol) {
    RatFun prod(1);
    for (const auto& pt : pts) {
        long e = LONG_MIN;
        for (const auto& t : pt.data.tsols) e = std::max(e, series_defect(t, pol));
        prod *= RatFun(pt.p).pow(e);
    }
    BasisElement b(r);
    b.at(0) = prod;
    return b;
}

/// Coefficient-matrix determinant of a full element tuple.
inline RatFun tuple_det(const std::vector<BasisElement>& tuple) {
    size_t r = tuple.size();
    Mat<RatFun> m(r, Vec<RatFun>(r));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) m[i][j] = tuple[i].coeff(static_cast<int>(j));
    return det(m);
}

/// Termination metric n = sum over handles of deg(p) * m_p, where m_p is the
/// integral offset of the generalized Wronskian of the tuple. The Wronskian
/// factors as det(C) * det(W_b), so its valuation is exact arithmetic on the
/// coefficient matrix plus the local Wronskian data.
inline long termination_metric(const std::vector<BasisElement>& tuple, const std::vector<PointCtx>& pts,
                               const IotaPolicy& pol) {
    RatFun dc = tuple_det(tuple);
    if (dc.is_zero()) fail(ErrKind::Internal, "degenerate element tuple");
    long n = 0;
    long r = static_cast<long>(tuple.size());
    for (const auto& pt : pts) {
        Rational sum(0);
        for (const auto& v : pt.data.nu) sum += v;
        Rational tau = Rational(dc.ord_at(pt.p)) + sum - Rational(r * (r - 1) / 2) + Rational(pt.data.m);
        Rational mp = tau - pol.eval(tau, 0);
        if (!mp.is_integer() || mp.sign() < 0)
            fail(ErrKind::Internal, "generalized Wronskian is not integral at " + pt.h.label);
        n += pt.p.degree() * mp.to_long();
    }
    return n;
}

} // namespace detail

struct AnsatzSystem {
    Mat<KElem> A;
    Vec<KElem> rhs;
};

/// The linear system over Q(alpha) expressing that
/// (a_0 B_0 + ... + a_{d-1} B_{d-1} + B_d) . t_i, divided by (x - alpha),
/// has zero coefficient at every non-integral position. `applied[j][i]`
/// holds B_j . t_i for j = 0..d.
inline AnsatzSystem ansatz_system(const std::vector<std::vector<LogSeries>>& applied,
                                  const IotaPolicy& pol) {
    size_t d = applied.size() - 1;
    AnsatzSystem sys;
    size_t nsols = applied.empty() ? 0 : applied[0].size();
    for (size_t i = 0; i < nsols; ++i) {
        std::vector<SeriesKey> positions;
        for (size_t j = 0; j <= d; ++j)
            for (const auto& [k, c] : applied[j][i].terms()) {
                if (k.exp - pol.eval(k.exp, k.logpow) <= Rational(0)) positions.push_back(k);
            }
        std::sort(positions.begin(), positions.end());
        positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
        for (const auto& pos : positions) {
            Vec<KElem> row(d);
            for (size_t j = 0; j < d; ++j) row[j] = applied[j][i].coeff_at(pos.exp, pos.logpow);
            sys.A.push_back(std::move(row));
            sys.rhs.push_back(-applied[d][i].coeff_at(pos.exp, pos.logpow));
        }
    }
    return sys;
}

namespace detail {

inline std::vector<LogSeries> apply_element(const BasisElement& b, const LocalData& data) {
    LocalizedOperator lop(b.as_ore(), data.handle.alpha);
    std::vector<LogSeries> out;
    for (const auto& t : data.tsols) out.push_back(lop.apply(t, Rational(3)));
    return out;
}

} // namespace detail

struct CheckWitness {
    std::string point;
    int solution = 0;
    Rational exp;
    int logpow = 0;
};

struct CheckResult {
    bool integral = false;
    std::optional<CheckWitness> witness;
};

inline CheckResult check_integral(const OrePoly& L, const BasisElement& b, const IotaPolicy& pol,
                                  const ClosureOptions& opt = {});

/// Algorithm main loop: B_0 from the local defects, then for each order d a
/// round-robin refinement over one root per squarefree factor of the leading
/// coefficient, dividing by the factor whenever the non-integrality system
/// is solvable.
inline ClosureResult integral_basis(const OrePoly& L, const IotaPolicy& pol, const ClosureOptions& opt = {}) {
    require_positive_order(L);
    int r = ore_order(L);
    QPoly lr = L.coeff(r).num();
    QPoly s = lr.degree() >= 1 ? squarefree_part(lr) : QPoly(1);

    ClosureResult res;
    res.basis.L = L;
    auto pts = detail::resolve_points(L, detail::leading_handles(L), pol, opt);

    std::vector<BasisElement> elems;
    elems.push_back(detail::b0_from_points(r, pts, pol));

    // fixed companions s^k D^k B_0 complete the tuple for the metric
    std::vector<BasisElement> fillers{elems[0]};
    for (int k = 1; k < r; ++k) fillers.push_back(RatFun(s) * apply_D_mod(L, fillers.back()));

    auto tuple_at = [&](int d, const BasisElement& bd) {
        std::vector<BasisElement> t;
        for (int j = 0; j < d; ++j) t.push_back(elems[static_cast<size_t>(j)]);
        t.push_back(bd);
        for (int k = d + 1; k < r; ++k) t.push_back(fillers[static_cast<size_t>(k)]);
        return t;
    };

    for (int d = 1; d < r; ++d) {
        BasisElement bd = RatFun(s) * apply_D_mod(L, elems.back());
        // per-point cache of B_j . t_i for the fixed elements of this stage
        std::vector<std::vector<std::vector<LogSeries>>> fixed(pts.size());
        auto fixed_for = [&](size_t pi) -> const std::vector<std::vector<LogSeries>>& {
            if (fixed[pi].empty())
                for (int j = 0; j < d; ++j)
                    fixed[pi].push_back(detail::apply_element(elems[static_cast<size_t>(j)], pts[pi].data));
            return fixed[pi];
        };

        std::vector<size_t> queue(pts.size());
        for (size_t i = 0; i < queue.size(); ++i) queue[i] = i;

        while (!queue.empty()) {
            bool restart = false;
            for (auto it = queue.begin(); it != queue.end() && !restart;) {
                size_t pi = *it;
                try {
                    std::vector<std::vector<LogSeries>> applied = fixed_for(pi);
                    applied.push_back(detail::apply_element(bd, pts[pi].data));
                    AnsatzSystem sys = ansatz_system(applied, pol);
                    auto sol = linsolve_opt(sys.A, sys.rhs);
                    if (!sol) {
                        it = queue.erase(it);
                        continue;
                    }
                    long before = detail::termination_metric(tuple_at(d, bd), pts, pol);
                    BasisElement next = bd;
                    for (int j = 0; j < d; ++j)
                        next = next + RatFun((*sol)[static_cast<size_t>(j)].rep()) * elems[static_cast<size_t>(j)];
                    next = RatFun(QPoly(1), pts[pi].p) * next;
                    long after = detail::termination_metric(tuple_at(d, next), pts, pol);
                    if (after >= before)
                        fail(ErrKind::Internal, "termination metric did not decrease at " + pts[pi].h.label);
                    res.trace.push_back(RefinementEvent{d, pts[pi].h.label, before, after});
                    bd = std::move(next);
                    ++it;
                } catch (const SplitError& se) {
                    // refine this handle and redo its work from scratch
                    std::vector<detail::PointCtx> refined;
                    for (const auto& f : se.event().factors)
                        for (auto& ctx : detail::resolve_point(L, f, pol, opt.bounds)) refined.push_back(std::move(ctx));
                    queue.clear();
                    std::vector<detail::PointCtx> newpts;
                    for (size_t k = 0; k < pts.size(); ++k) {
                        if (k == pi) {
                            for (auto& ctx : refined) newpts.push_back(std::move(ctx));
                        } else {
                            newpts.push_back(std::move(pts[k]));
                        }
                    }
                    std::sort(newpts.begin(), newpts.end(),
                              [](const detail::PointCtx& a, const detail::PointCtx& b) {
                                  return detail::poly_before(a.p, b.p);
                              });
                    pts = std::move(newpts);
                    fixed.assign(pts.size(), {});
                    queue.resize(pts.size());
                    for (size_t k = 0; k < queue.size(); ++k) queue[k] = k;
                    restart = true;
                }
            }
        }
        elems.push_back(std::move(bd));
    }

    // canonical scaling: monic numerator and denominator of the leading
    // D-coefficient
    for (auto& e : elems) {
        int o = e.ord_or_neg();
        if (o < 0) fail(ErrKind::Internal, "zero basis element");
        Rational lead = e.coeff(o).num().lc();
        e = RatFun(lead.inverse()) * e;
    }
    res.basis.elements = elems;
    for (const auto& pt : pts)
        res.points.push_back(PointDiagnostics{pt.h.label, pt.data.nu, pt.data.logdeg, pt.data.m, pt.data.N});
    if (opt.verify_output) {
        // replay every element against freshly computed local data
        for (const auto& e : res.basis.elements)
            if (!check_integral(L, e, pol, opt).integral)
                fail(ErrKind::Internal, "produced a non-integral basis element");
    }
    return res;
}

/// Def.-2 membership test for an element of C(x)[D]/<L>, with a certificate
/// term on failure. Checked points: one root per squarefree factor of the
/// leading coefficient, plus every denominator factor of B outside it.
inline CheckResult check_integral(const OrePoly& L, const BasisElement& b, const IotaPolicy& pol,
                                  const ClosureOptions& opt) {
    require_positive_order(L);
    std::vector<QPoly> handles = detail::leading_handles(L);
    {
        int r = ore_order(L);
        QPoly lr = L.coeff(r).num();
        QPoly dens(1);
        for (const auto& c : b.coeffs()) dens = poly_lcm(dens, c.den());
        if (dens.degree() >= 1)
            for (const auto& [f, mult] : squarefree_decomposition(dens)) {
                QPoly extra = f.exact_div(poly_gcd(f, lr));
                if (extra.degree() >= 1) handles.push_back(extra.monic());
            }
    }
    auto pts = detail::resolve_points(L, handles, pol, opt);
    for (size_t idx = 0; idx < pts.size(); ++idx) {
        std::vector<LogSeries> applied;
        while (true) {
            try {
                applied = detail::apply_element(b, pts[idx].data);
                break;
            } catch (const SplitError& se) {
                std::vector<detail::PointCtx> sub;
                for (const auto& f : se.event().factors)
                    for (auto& ctx : detail::resolve_point(L, f, pol, opt.bounds)) sub.push_back(std::move(ctx));
                pts.erase(pts.begin() + static_cast<long>(idx));
                pts.insert(pts.begin() + static_cast<long>(idx), std::make_move_iterator(sub.begin()),
                           std::make_move_iterator(sub.end()));
            }
        }
        for (size_t i = 0; i < applied.size(); ++i) {
            for (const auto& [k, c] : applied[i].terms()) {
                if (k.exp - pol.eval(k.exp, k.logpow) < Rational(0))
                    return CheckResult{false,
                                       CheckWitness{pts[idx].h.label, static_cast<int>(i) + 1, k.exp, k.logpow}};
            }
        }
    }
    return CheckResult{true, std::nullopt};
}

/// Change-of-basis matrix M with to = M . from, when both lists are bases.
inline Mat<RatFun> module_transform(const std::vector<std::vector<RatFun>>& from,
                                    const std::vector<std::vector<RatFun>>& to) {
    size_t r = from.size();
    if (r == 0 || to.size() != r) fail(ErrKind::ShapeMismatch, "module_transform: size mismatch");
    Mat<RatFun> cf(r, Vec<RatFun>(r)), ct(r, Vec<RatFun>(r));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) {
            cf[i][j] = j < from[i].size() ? from[i][j] : RatFun();
            ct[i][j] = j < to[i].size() ? to[i][j] : RatFun();
        }
    if (det(cf).is_zero() || det(ct).is_zero())
        fail(ErrKind::NotABasis, "module_transform: input lists are linearly dependent");
    // solve row_i(to) = m_i . C_from, i.e. C_from^T m_i^T = to_i^T
    Mat<RatFun> cft(r, Vec<RatFun>(r));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) cft[i][j] = cf[j][i];
    Mat<RatFun> m(r, Vec<RatFun>(r));
    for (size_t i = 0; i < r; ++i) {
        auto sol = linsolve_opt(cft, ct[i]);
        if (!sol) fail(ErrKind::Internal, "module_transform: inconsistent solve");
        m[i] = std::move(*sol);
    }
    return m;
}

/// Whether two element lists generate the same module over Q[x]: the
/// change-of-basis matrix is polynomial with constant nonzero determinant.
inline bool module_equal(const std::vector<std::vector<RatFun>>& b1,
                         const std::vector<std::vector<RatFun>>& b2) {
    Mat<RatFun> m = module_transform(b1, b2);
    for (const auto& row : m)
        for (const auto& e : row)
            if (!e.is_polynomial()) return false;
    RatFun d = det(m);
    return !d.is_zero() && d.is_constant();
}

inline std::vector<std::vector<RatFun>> coeff_rows(const std::vector<BasisElement>& es) {
    std::vector<std::vector<RatFun>> rows;
    for (const auto& e : es) rows.push_back(e.coeffs());
    return rows;
}

/// Zero-order element of the basis: the product of the local defect powers.
inline BasisElement compute_B0(const OrePoly& L, const IotaPolicy& pol, const ClosureOptions& opt = {}) {
    require_positive_order(L);
    int r = ore_order(L);
    auto pts = detail::resolve_points(L, detail::leading_handles(L), pol, opt);
    return detail::b0_from_points(r, pts, pol);
}

} // namespace ibasis
