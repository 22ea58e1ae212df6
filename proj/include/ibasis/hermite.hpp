#pragma once

#include <optional>
#include <vector>

#include "ibasis/closure.hpp"

namespace ibasis {

/// Integrand or reduction output over a fixed basis w_0..w_{r-1}:
///   (a_0 w_0 + ... + a_{r-1} w_{r-1}) / (u v^m)
/// with v monic squarefree, gcd(u, v) = 1. m = 0 is allowed for outputs.
struct BasisVector {
    std::vector<QPoly> a;
    QPoly u{1};
    QPoly v{std::vector<Rational>{Rational(0), Rational(1)}};
    long m = 1;
};

inline BasisVector normalized_basis_vector(std::vector<QPoly> a, QPoly u, QPoly v, long m) {
    if (v.degree() < 1) fail(ErrKind::BadDenominatorShape, "v must be nonconstant");
    if (u.is_zero()) fail(ErrKind::BadDenominatorShape, "u must be nonzero");
    if (m < 1) fail(ErrKind::BadDenominatorShape, "m must be positive");
    Rational lead = v.lc();
    if (!lead.is_one()) {
        v = v.monic();
        u = lead.pow(m) * u;
    }
    if (poly_gcd(v, v.derivative()).degree() != 0)
        fail(ErrKind::BadDenominatorShape, "v must be squarefree");
    if (poly_gcd(u, v).degree() != 0) fail(ErrKind::BadDenominatorShape, "u and v must be coprime");
    return BasisVector{std::move(a), std::move(u), std::move(v), m};
}

/// Matrix M with D . w_i = sum_j M[i][j] w_j for the given basis.
inline Mat<RatFun> derivative_matrix(const OrePoly& L, const std::vector<BasisElement>& basis) {
    size_t r = basis.size();
    if (r != static_cast<size_t>(ore_order(L)))
        fail(ErrKind::ShapeMismatch, "basis size must match the operator order");
    Mat<RatFun> coeff(r, Vec<RatFun>(r)), rows(r, Vec<RatFun>(r));
    for (size_t i = 0; i < r; ++i) {
        for (size_t j = 0; j < r; ++j) coeff[i][j] = basis[i].coeff(static_cast<int>(j));
        BasisElement der = apply_D_mod(L, basis[i]);
        for (size_t j = 0; j < r; ++j) rows[i][j] = der.coeff(static_cast<int>(j));
    }
    if (det(coeff).is_zero()) fail(ErrKind::NotABasis, "derivative_matrix: dependent basis");
    Mat<RatFun> ct(r, Vec<RatFun>(r));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) ct[i][j] = coeff[j][i];
    Mat<RatFun> m(r, Vec<RatFun>(r));
    for (size_t i = 0; i < r; ++i) {
        auto sol = linsolve_opt(ct, rows[i]);
        if (!sol) fail(ErrKind::Internal, "derivative_matrix: inconsistent solve");
        m[i] = std::move(*sol);
    }
    return m;
}

/// Coordinates of D(g . w) over the basis, for g given in basis coordinates.
inline std::vector<RatFun> apply_derivation(const Mat<RatFun>& m, const std::vector<RatFun>& g) {
    size_t r = m.size();
    std::vector<RatFun> out(r);
    for (size_t k = 0; k < r; ++k) {
        out[k] = g[k].derivative();
        for (size_t i = 0; i < r; ++i) out[k] += g[i] * m[i][k];
    }
    return out;
}

namespace detail {

inline QPoly crt_combine(const QPoly& b1, const QPoly& v1, const QPoly& b2, const QPoly& v2) {
    auto [g, inv] = poly_half_xgcd(v1, v2); // inv * v1 = 1 mod v2
    if (g.degree() != 0) fail(ErrKind::Internal, "crt moduli not coprime");
    QPoly diff = (b2 - b1).divrem(v2).second;
    QPoly t = (inv * diff).divrem(v2).second;
    return b1 + v1 * t;
}

/// Solves S b = rhs over Q[x]/<v> with dynamic evaluation; entries are
/// rational functions whose denominators must be invertible mod v.
inline std::optional<std::vector<QPoly>> solve_mod(const Mat<RatFun>& s, const std::vector<RatFun>& rhs,
                                                   const QPoly& v) {
    try {
        auto field = NumberField::make(v, "x");
        auto reduce = [&](const RatFun& q) -> KElem {
            if (poly_gcd(q.den(), v).degree() != 0)
                fail(ErrKind::ReductionObstruction, "denominator of a reduction coefficient meets v");
            KElem num(field, q.num().divrem(v).second);
            KElem den(field, q.den().divrem(v).second);
            return num * den.inverse();
        };
        Mat<KElem> a(s.size());
        Vec<KElem> b;
        for (size_t i = 0; i < s.size(); ++i) {
            for (const auto& e : s[i]) a[i].push_back(reduce(e));
            b.push_back(reduce(rhs[i]));
        }
        auto sol = linsolve_opt(a, b);
        if (!sol) return std::nullopt;
        std::vector<QPoly> out;
        for (const auto& e : *sol) out.push_back(e.rep());
        return out;
    } catch (const SplitError& se) {
        const auto& f = se.event().factors;
        QPoly v1 = f[0], v2 = f[1];
        for (size_t i = 2; i < f.size(); ++i) v2 *= f[i];
        auto r1 = solve_mod(s, rhs, v1);
        if (!r1) return std::nullopt;
        auto r2 = solve_mod(s, rhs, v2);
        if (!r2) return std::nullopt;
        std::vector<QPoly> out;
        for (size_t i = 0; i < r1->size(); ++i) out.push_back(crt_combine((*r1)[i], v1, (*r2)[i], v2));
        return out;
    }
}

} // namespace detail

struct HermiteResult {
    BasisVector g; // f = D(g . w) + h; denominator v^(m-1)
    BasisVector h; // remainder with denominator u v
    bool obstructed = false;
};

/// Iterated Hermite step: each round finds b with
///   a = u (v b' - (m-1) v' b + v M^T b) mod v
/// and strips one power of v from the denominator. An unsolvable round
/// reports the partial reduction instead.
inline HermiteResult hermite_reduce(const OrePoly& L, const std::vector<BasisElement>& basis,
                                    const BasisVector& f0) {
    size_t r = basis.size();
    if (f0.a.size() != r) fail(ErrKind::ShapeMismatch, "numerator count must match the basis");
    BasisVector f = normalized_basis_vector(f0.a, f0.u, f0.v, f0.m);
    Mat<RatFun> m = derivative_matrix(L, basis);
    const QPoly& v = f.v;
    QPoly vp = v.derivative();
    long m0 = f.m;

    std::vector<QPoly> gnum(r); // over denominator v^(m0-1)
    bool obstructed = false;
    while (f.m > 1) {
        // system: for each basis index k,
        //   a_k = u * ( sum_i (v M_{ik}) b_i - (m-1) v' b_k )  mod v
        Mat<RatFun> s(r, Vec<RatFun>(r));
        std::vector<RatFun> rhs(r);
        RatFun uf(f.u), vf(v);
        for (size_t k = 0; k < r; ++k) {
            for (size_t i = 0; i < r; ++i) {
                s[k][i] = uf * (vf * m[i][k]);
                if (i == k) s[k][i] -= uf * RatFun(Rational(f.m - 1)) * RatFun(vp);
            }
            rhs[k] = RatFun(f.a[k]);
        }
        std::optional<std::vector<QPoly>> b;
        try {
            b = detail::solve_mod(s, rhs, v);
        } catch (const Error& e) {
            if (e.kind() != ErrKind::ReductionObstruction) throw;
            b = std::nullopt;
        }
        if (!b) {
            obstructed = true;
            break;
        }
        // g-step b / v^(m-1); remaining integrand f - D(g_step . w)
        std::vector<RatFun> gstep(r);
        for (size_t k = 0; k < r; ++k) gstep[k] = RatFun((*b)[k], v.pow(f.m - 1));
        std::vector<RatFun> dg = apply_derivation(m, gstep);
        QPoly newden_u = f.u;
        std::vector<QPoly> na(r);
        for (size_t k = 0; k < r; ++k) {
            RatFun rem = RatFun(f.a[k], f.u * v.pow(f.m)) - dg[k];
            RatFun scaled = rem * RatFun(newden_u * v.pow(f.m - 1));
            if (!scaled.is_polynomial()) fail(ErrKind::Internal, "hermite step left a denominator behind");
            na[k] = scaled.num();
        }
        for (size_t k = 0; k < r; ++k) gnum[k] += (*b)[k] * v.pow(m0 - f.m);
        f = BasisVector{std::move(na), f.u, v, f.m - 1};
    }

    HermiteResult out;
    out.g = BasisVector{std::move(gnum), QPoly(1), v, m0 - 1};
    out.h = std::move(f);
    out.obstructed = obstructed;

    // exactness: f0 = D(g . w) + h as an identity over Q(x)
    if (!obstructed) {
        std::vector<RatFun> gcoords(r), residual(r);
        for (size_t k = 0; k < r; ++k) gcoords[k] = RatFun(out.g.a[k], out.g.v.pow(out.g.m));
        std::vector<RatFun> dg = apply_derivation(m, gcoords);
        for (size_t k = 0; k < r; ++k) {
            residual[k] = RatFun(f0.a[k]) / RatFun(f0.u * f0.v.pow(f0.m)) - dg[k] -
                          RatFun(out.h.a[k], out.h.u * out.h.v.pow(out.h.m));
            if (!residual[k].is_zero()) fail(ErrKind::Internal, "hermite reduction identity failed");
        }
    }
    return out;
}

} // namespace ibasis
