#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pdtune/errors.hpp"
#include "pdtune/io.hpp"
#include "pdtune/polynomial.hpp"

using namespace pdtune;

namespace {

Polynomial random_poly(std::mt19937_64& rng, std::size_t nvars, unsigned max_deg, int n_terms) {
    std::uniform_int_distribution<unsigned> e(0, max_deg);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    Polynomial p(nvars);
    for (int t = 0; t < n_terms; ++t) {
        Exponents ex(nvars);
        for (auto& x : ex) x = e(rng);
        p += Polynomial::monomial(nvars, ex, c(rng));
    }
    return p;
}

bool no_zero_coefs(const Polynomial& p) {
    for (const auto& [e, c] : p.terms())
        if (c == 0.0) return false;
    return true;
}

// figure 1 boundary
Polynomial circle() {
    auto z1 = Polynomial::variable(2, 0), z2 = Polynomial::variable(2, 1);
    return z1 * z1 + z2 * z2 - Polynomial::constant(2, 4.0);
}

}  // namespace

TEST_CASE("eval examples") {
    std::vector<double> z{2.0, 0.0};
    CHECK(poly_eval(circle(), z) == 0.0);
    CHECK(poly_eval(Polynomial(2), z) == 0.0);
    auto z1 = Polynomial::variable(2, 0);
    CHECK(poly_eval(pow(z1, 3), z) == 8.0);
    std::vector<double> bad{1.0};
    CHECK_THROWS_AS(poly_eval(circle(), bad), DimensionError);
}

TEST_CASE("add and mul examples") {
    auto z1 = Polynomial::variable(1, 0);
    auto s = poly_add(z1, -z1);
    CHECK(s.is_zero());
    CHECK(s.terms().empty());
    auto one = Polynomial::constant(1, 1.0);
    auto prod = poly_mul(z1 + one, z1 * z1 - Polynomial::constant(1, 3.0));
    CHECK(prod.degree() == 3);
    auto P = circle();
    CHECK(poly_mul(P, Polynomial::constant(2, 1.0)) == P);
    CHECK_THROWS_AS(poly_add(z1, Polynomial::variable(2, 0)), DimensionError);
    CHECK_THROWS_AS(poly_mul(z1, Polynomial::variable(2, 0)), DimensionError);
    CHECK(Polynomial(3).degree() == 0);
}

TEST_CASE("rational examples") {
    auto z1 = Polynomial::variable(1, 0);
    RationalFunction id(z1);
    std::vector<double> five{5.0};
    CHECK(rational_eval(id, five) == 5.0);

    auto one = Polynomial::constant(1, 1.0);
    RationalFunction pole(z1 * z1 - one, z1 - one);
    std::vector<double> at1{1.0};
    CHECK_THROWS_AS(rational_eval(pole, at1), SingularityError);
    CHECK(pole.degree() == 2);

    auto a = Polynomial::variable(2, 0), b = Polynomial::variable(2, 1);
    RationalFunction r(a * b, a + b);
    std::vector<double> ones{1.0, 1.0};
    CHECK(rational_eval(r, ones) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS(RationalFunction(z1, Polynomial(1)));
}

TEST_CASE("singularity tolerance is configurable") {
    auto z1 = Polynomial::variable(1, 0);
    RationalFunction r(Polynomial::constant(1, 1.0), z1);
    std::vector<double> tiny{1e-13};
    CHECK_THROWS_AS(rational_eval(r, tiny), SingularityError);
    CHECK(rational_eval(r, tiny, 1e-14) == doctest::Approx(1e13));
}

TEST_CASE("add is pointwise over 1000 random cases") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + t % 4;
        auto P = random_poly(rng, n, 3, 6), Q = random_poly(rng, n, 3, 6);
        std::vector<double> z(n);
        for (auto& v : z) v = u(rng);
        const double lhs = poly_eval(poly_add(P, Q), z);
        const double rhs = poly_eval(P, z) + poly_eval(Q, z);
        const double scale = std::max({1.0, std::abs(poly_eval(P, z)), std::abs(poly_eval(Q, z))});
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * scale);
        REQUIRE(no_zero_coefs(poly_add(P, Q)));
        REQUIRE(no_zero_coefs(poly_mul(P, Q)));
        REQUIRE(no_zero_coefs(P - P));
    }
}

TEST_CASE("generic product degree is the sum") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + t % 3;
        auto P = random_poly(rng, n, 4, 5), Q = random_poly(rng, n, 4, 5);
        if (P.is_zero() || Q.is_zero()) continue;
        REQUIRE(poly_mul(P, Q).degree() == P.degree() + Q.degree());
    }
}

TEST_CASE("degree_in and embed") {
    auto z1 = Polynomial::variable(2, 0), z2 = Polynomial::variable(2, 1);
    auto p = z1 * z1 * z2;
    CHECK(p.degree_in(0) == 2);
    CHECK(p.degree_in(1) == 1);
    auto q = p.embed(4, 1);
    std::vector<double> z{9.0, 2.0, 3.0, 9.0};
    CHECK(q.eval(z) == 12.0);
}

TEST_CASE("determinant agrees with numeric determinant") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 1; n <= 5; ++n) {
        std::vector<std::vector<Polynomial>> M(n, std::vector<Polynomial>(n, Polynomial(2)));
        for (auto& row : M)
            for (auto& e : row) e = random_poly(rng, 2, 1, 3);
        const auto det = determinant(M);
        for (int k = 0; k < 10; ++k) {
            std::vector<double> z{u(rng), u(rng)};
            Eigen::MatrixXd num(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) num(i, j) = M[i][j].eval(z);
            CHECK(det.eval(z) == doctest::Approx(num.determinant()).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("json round trip") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 50; ++t) {
        auto P = random_poly(rng, 3, 3, 5);
        auto back = polynomial_from_json(json::parse(to_json(P).dump()));
        REQUIRE(back == P);
        RationalFunction r(P, Polynomial::constant(3, 2.0) + random_poly(rng, 3, 2, 2));
        if (r.denominator().is_zero()) continue;
        REQUIRE(rational_from_json(to_json(r)) == r);
    }
    const auto j = to_json(circle());
    CHECK(j["nvars"] == 2);
    // exponent vectors come out in lexicographic order
    CHECK(j["terms"][0]["exps"] == json::array({0, 0}));
}
