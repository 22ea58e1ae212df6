#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ibasis/hermite.hpp"
#include "ibasis/parser.hpp"
#include "ibasis/printer.hpp"

using namespace ibasis;

namespace {
OrePoly op(const char* s) { return parse_operator(s); }
BasisElement elem(const char* s, const OrePoly& L) { return reduce_mod(L, parse_operator(s)); }
RatFun rf(const char* num, const char* den) { return RatFun(parse_poly(num), parse_poly(den)); }

const char* LCLOSE = "(2*x+1) - (4*x^2+1)*D + 2*(2*x-1)*x*D^2";
std::vector<BasisElement> close_basis(const OrePoly& L) {
    return {elem("1", L), elem("(1/(2*x-1))*(2*x*D - 1)", L)};
}
} // namespace

TEST_CASE("derivative matrix of the closing example basis") {
    OrePoly L = op(LCLOSE);
    Mat<RatFun> m = derivative_matrix(L, close_basis(L));
    REQUIRE(m[0][0] == rf("1", "2*x"));
    REQUIRE(m[0][1] == rf("2*x-1", "2*x")); // = -(1-2x)/(2x)
    REQUIRE(m[1][0] == RatFun(0));
    REQUIRE(m[1][1] == RatFun(1));
}

TEST_CASE("derivative matrix of the power basis is the companion matrix") {
    OrePoly L = op("x^3*D^3 + x*D - 1");
    std::vector<BasisElement> pw{elem("1", L), elem("D", L), elem("D^2", L)};
    Mat<RatFun> m = derivative_matrix(L, pw);
    REQUIRE(m[0][1] == RatFun(1));
    REQUIRE(m[1][2] == RatFun(1));
    BasisElement d3 = reduce_pow(L, 3);
    for (int j = 0; j < 3; ++j) REQUIRE(m[2][static_cast<size_t>(j)] == d3.coeff(j));
}

TEST_CASE("derivative matrix for order one") {
    OrePoly L = op("1 - D");
    std::vector<BasisElement> b{elem("1", L)};
    Mat<RatFun> m = derivative_matrix(L, b);
    REQUIRE(m[0][0] == RatFun(1));
}

TEST_CASE("hermite reduction of the closing integrand") {
    OrePoly L = op(LCLOSE);
    auto basis = close_basis(L);
    BasisVector f;
    f.a = {parse_poly("4*x^2 + 37*x - 11"), parse_poly("-28*x^3 + 40*x^2 - x - 1")};
    f.u = parse_poly("4");
    f.v = parse_poly("(x-1)*x");
    f.m = 2;
    HermiteResult res = hermite_reduce(L, basis, f);
    REQUIRE_FALSE(res.obstructed);
    // the mod-v step solution is unique; the exact reduction identity
    // pins b = (-(4x+11)/2, -5(2x-1)/2)
    REQUIRE(res.g.a[0] == parse_poly("-(4*x+11)/2"));
    REQUIRE(res.g.a[1] == parse_poly("-5/2*(2*x-1)"));
    REQUIRE(res.g.m == 1);
    REQUIRE(res.g.v == parse_poly("x^2 - x"));
    for (const auto& c : res.h.a) REQUIRE(c.is_zero());

    // antiderivative in D-coordinates: -5/(x-1) y' - (2x+3)/((x-1)x) y
    std::vector<RatFun> gcoords(2), dcoords(2);
    for (size_t k = 0; k < 2; ++k) gcoords[k] = RatFun(res.g.a[k], res.g.v);
    for (size_t k = 0; k < 2; ++k)
        for (size_t i = 0; i < 2; ++i) dcoords[k] += gcoords[i] * basis[i].coeff(static_cast<int>(k));
    REQUIRE(dcoords[0] == rf("-(2*x+3)", "(x-1)*x"));
    REQUIRE(dcoords[1] == rf("-5", "x-1"));

    // independent route: the reduction identity via the derivative matrix
    Mat<RatFun> m = derivative_matrix(L, basis);
    std::vector<RatFun> dg = apply_derivation(m, gcoords);
    for (size_t k = 0; k < 2; ++k)
        REQUIRE(dg[k] == RatFun(f.a[k]) / RatFun(f.u * f.v * f.v));
}

TEST_CASE("m = 1 input passes through unchanged") {
    OrePoly L = op(LCLOSE);
    auto basis = close_basis(L);
    BasisVector f;
    f.a = {parse_poly("x"), parse_poly("1")};
    f.u = parse_poly("1");
    f.v = parse_poly("(x-1)*x");
    f.m = 1;
    HermiteResult res = hermite_reduce(L, basis, f);
    REQUIRE_FALSE(res.obstructed);
    for (const auto& c : res.g.a) REQUIRE(c.is_zero());
    REQUIRE(res.h.a == f.a);
    REQUIRE(res.h.m == 1);
}

TEST_CASE("exponential integrand over the trivial basis") {
    // y' = y, f = y/x^2: g = -y/x, h = y/x
    OrePoly L = op("1 - D");
    std::vector<BasisElement> basis{elem("1", L)};
    BasisVector f;
    f.a = {parse_poly("1")};
    f.u = QPoly(1);
    f.v = QPoly::variable();
    f.m = 2;
    HermiteResult res = hermite_reduce(L, basis, f);
    REQUIRE_FALSE(res.obstructed);
    REQUIRE(res.g.a[0] == parse_poly("-1"));
    REQUIRE(res.g.v == QPoly::variable());
    REQUIRE(res.g.m == 1);
    REQUIRE(res.h.a[0] == parse_poly("1"));
    REQUIRE(res.h.m == 1);
}

TEST_CASE("denominator shape violations are rejected") {
    OrePoly L = op(LCLOSE);
    auto basis = close_basis(L);
    BasisVector f;
    f.a = {QPoly(1), QPoly(0)};
    f.u = QPoly(1);
    f.v = parse_poly("x^2"); // not squarefree
    f.m = 2;
    REQUIRE_THROWS_AS(hermite_reduce(L, basis, f), Error);
    f.v = parse_poly("x");
    f.u = parse_poly("x+1");
    f.m = 0; // not positive
    REQUIRE_THROWS_AS(hermite_reduce(L, basis, f), Error);
    f.m = 2;
    f.u = parse_poly("x"); // gcd(u, v) != 1
    REQUIRE_THROWS_AS(hermite_reduce(L, basis, f), Error);
}

TEST_CASE("reduction obstruction reports the partial result") {
    // basis {1, D} for 1 + x^2 D^2: v M has a pole at the root of v
    OrePoly L = op("1 + x^2*D^2");
    std::vector<BasisElement> basis{elem("1", L), elem("D", L)};
    BasisVector f;
    f.a = {QPoly(1), QPoly(0)};
    f.u = QPoly(1);
    f.v = QPoly::variable();
    f.m = 2;
    HermiteResult res = hermite_reduce(L, basis, f);
    REQUIRE(res.obstructed);
    REQUIRE(res.h.m == 2); // untouched remainder comes back
    REQUIRE(res.h.a == f.a);
}

TEST_CASE("random integrands reduce exactly over the closing basis") {
    OrePoly L = op(LCLOSE);
    auto basis = close_basis(L);
    Mat<RatFun> m = derivative_matrix(L, basis);
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<long> c(-9, 9);
    int reduced = 0;
    for (int trial = 0; trial < 60; ++trial) {
        BasisVector f;
        for (int k = 0; k < 2; ++k) {
            std::vector<Rational> pc;
            for (int d = 0; d <= 3; ++d) pc.emplace_back(c(rng));
            f.a.push_back(QPoly(pc));
        }
        f.u = QPoly(Rational(1 + (trial % 3)));
        f.v = parse_poly("(x-1)*x");
        f.m = 2 + (trial % 2);
        HermiteResult res = hermite_reduce(L, basis, f);
        if (res.obstructed) continue;
        ++reduced;
        REQUIRE(res.h.m == 1);
        // the identity itself is asserted inside hermite_reduce; double-check
        // the remainder denominator shape here
        REQUIRE(res.g.m == f.m - 1);
    }
    REQUIRE(reduced >= 50);
}
