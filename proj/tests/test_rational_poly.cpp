#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ibasis/ratfun.hpp"
#include "ibasis/unipoly.hpp"

using namespace ibasis;

namespace {

Rational rand_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-40, 40);
    std::uniform_int_distribution<long> den(1, 12);
    return Rational(num(rng), den(rng));
}

QPoly rand_poly(std::mt19937_64& rng, int maxdeg) {
    std::uniform_int_distribution<int> deg(0, maxdeg);
    int d = deg(rng);
    std::vector<Rational> c;
    for (int i = 0; i <= d; ++i) c.push_back(rand_rational(rng));
    return QPoly(std::move(c));
}

QPoly qp(std::initializer_list<long> lowfirst) {
    std::vector<Rational> c;
    for (long v : lowfirst) c.emplace_back(v);
    return QPoly(std::move(c));
}

} // namespace

TEST_CASE("rational field axioms on random values") {
    std::mt19937_64 rng(20240219);
    for (int i = 0; i < 250; ++i) {
        Rational a = rand_rational(rng), b = rand_rational(rng), c = rand_rational(rng);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a + (-a) == Rational(0));
        if (!a.is_zero()) REQUIRE(a * a.inverse() == Rational(1));
    }
}

TEST_CASE("rational canonical form and parsing") {
    REQUIRE(Rational(6, -4) == Rational(-3, 2));
    REQUIRE(Rational(6, -4).den() == 2);
    REQUIRE(Rational::parse("-3/2").to_string() == "-3/2");
    REQUIRE(Rational::parse("10/5") == Rational(2));
    REQUIRE(Rational(7, 3).frac01() == Rational(1, 3));
    REQUIRE(Rational(-7, 3).frac01() == Rational(2, 3));
    REQUIRE_THROWS_AS(Rational::parse("x"), Error);
}

TEST_CASE("squarefree_part examples") {
    // x^2 -> x
    REQUIRE(squarefree_part(qp({0, 0, 1})) == qp({0, 1}));
    // (x-1)^2 (x+1) -> (x-1)(x+1)
    QPoly p = qp({-1, 1}) * qp({-1, 1}) * qp({1, 1});
    REQUIRE(squarefree_part(p) == qp({-1, 1}) * qp({1, 1}));
    // 2(2x-1)x -> monic x(x - 1/2)
    QPoly q = Rational(2) * (qp({-1, 2}) * qp({0, 1}));
    QPoly expect = QPoly(std::vector<Rational>{Rational(0), Rational(-1, 2), Rational(1)});
    REQUIRE(squarefree_part(q) == expect);
    REQUIRE_THROWS_AS(squarefree_part(QPoly()), Error);
}

TEST_CASE("squarefree_part divides input and is squarefree (random)") {
    std::mt19937_64 rng(777);
    for (int i = 0; i < 200; ++i) {
        QPoly a = rand_poly(rng, 3), b = rand_poly(rng, 2);
        if (a.is_zero() || b.is_zero()) continue;
        QPoly p = a * a * b;
        if (p.is_zero()) continue;
        QPoly s = squarefree_part(p);
        REQUIRE(s.divides(p));
        if (s.degree() > 0) REQUIRE(poly_gcd(s, s.derivative()).degree() == 0);
    }
}

TEST_CASE("poly_gcd examples and Euclid oracle") {
    REQUIRE(poly_gcd(qp({0, 0, 1}), qp({0, 1})) == qp({0, 1}));
    REQUIRE(poly_gcd(qp({-1, 1}), qp({1, 1})) == QPoly(1));
    // gcd(x^3 - x, x^2 - 1) = x^2 - 1
    REQUIRE(poly_gcd(qp({0, -1, 0, 1}), qp({-1, 0, 1})) == qp({-1, 0, 1}));
    REQUIRE(poly_gcd(qp({0, 1}), QPoly()) == qp({0, 1}));

    std::mt19937_64 rng(12345);
    for (int i = 0; i < 100; ++i) {
        QPoly a = rand_poly(rng, 4), b = rand_poly(rng, 4);
        QPoly g = poly_gcd(a, b);
        if (g.is_zero()) {
            REQUIRE(a.is_zero());
            REQUIRE(b.is_zero());
            continue;
        }
        REQUIRE(g.divides(a));
        REQUIRE(g.divides(b));
    }
}

TEST_CASE("squarefree decomposition reassembles") {
    QPoly p = qp({-1, 1}).pow(3) * qp({1, 1}) * qp({0, 1}).pow(2);
    auto dec = squarefree_decomposition(p);
    QPoly prod(1);
    for (const auto& [f, m] : dec) {
        prod *= f.pow(m);
        REQUIRE(poly_gcd(f, f.derivative()).degree() == 0);
    }
    REQUIRE(prod == p.monic());
}

TEST_CASE("rational_roots finds roots with multiplicity") {
    // 24 nu^3 - 134 nu^2 + 373 nu/... use (nu - 3/2)(nu - 10/3)(nu - 15/4) * 24
    QPoly p = Rational(24) * (QPoly(std::vector<Rational>{Rational(-3, 2), Rational(1)}) *
                              QPoly(std::vector<Rational>{Rational(-10, 3), Rational(1)}) *
                              QPoly(std::vector<Rational>{Rational(-15, 4), Rational(1)}));
    auto roots = rational_roots(p);
    REQUIRE(roots.size() == 3);
    REQUIRE(roots[0] == std::make_pair(Rational(3, 2), 1));
    REQUIRE(roots[1] == std::make_pair(Rational(10, 3), 1));
    REQUIRE(roots[2] == std::make_pair(Rational(15, 4), 1));

    QPoly q = qp({-1, 1}).pow(3);
    auto r2 = rational_roots(q);
    REQUIRE(r2.size() == 1);
    REQUIRE(r2[0] == std::make_pair(Rational(1), 3));

    // no rational roots
    REQUIRE(rational_roots(qp({-2, 0, 1})).empty());
    // root at zero
    auto r3 = rational_roots(qp({0, 0, 2}));
    REQUIRE(r3.size() == 1);
    REQUIRE(r3[0] == std::make_pair(Rational(0), 2));
}

TEST_CASE("ratfun canonical form and arithmetic") {
    RatFun f(qp({0, 2}), qp({0, 0, 4})); // 2x / 4x^2 = (1/2)/x
    REQUIRE(f.den() == qp({0, 1}));
    REQUIRE(f.num() == QPoly(Rational(1, 2)));
    RatFun g = f + f;
    REQUIRE(g == RatFun(QPoly(1), qp({0, 1})));
    REQUIRE((g * g.inverse()).is_one());
    REQUIRE((g - g).is_zero());

    RatFun h(qp({1}), qp({-1, 1})); // 1/(x-1)
    REQUIRE(h.derivative() == -RatFun(QPoly(1), qp({-1, 1}) * qp({-1, 1})));
    REQUIRE(h.ord_at(qp({-1, 1})) == -1);
    REQUIRE(RatFun(qp({0, 0, 3})).ord_at(qp({0, 1})) == 2);
}
