#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "pdtune/errors.hpp"
#include "pdtune/gj.hpp"
#include "pdtune/io.hpp"
#include "pdtune/polynomial.hpp"
#include "gj_oracle.hpp"

using namespace pdtune;

using namespace testing_support;

TEST_CASE("degree examples") {
    GjProgram sum(2, {gj::Input{0}, gj::Input{1}, arith(ArithOp::Add, 0, 1)}, 2);
    CHECK(gj_degree(sum) == 1);

    GjProgram ratio(2,
                    {gj::Input{0}, gj::Input{1}, arith(ArithOp::Mul, 0, 1), arith(ArithOp::Mul, 0, 0),
                     gj::Const{1.0}, arith(ArithOp::Add, 3, 4), arith(ArithOp::Div, 2, 5)},
                    6);
    CHECK(gj_degree(ratio) == 2);

    GjProgram self(1, {gj::Input{0}, arith(ArithOp::Div, 0, 0)}, 1);
    CHECK(gj_degree(self) == 1);
    CHECK(self.degrees()[1] == FormalDegree{1, 1});
}

TEST_CASE("predicate complexity examples") {
    GjProgram none(1, {gj::Input{0}, arith(ArithOp::Mul, 0, 0)}, 1);
    CHECK(gj_predicate_complexity(none) == 0);

    GjProgram same(1,
                   {gj::Input{0}, gj::Const{2.0}, arith(ArithOp::Sub, 0, 1), gj::Cond{2, 0, 1},
                    gj::Cond{2, 1, 0}},
                   4);
    CHECK(gj_predicate_complexity(same) == 1);

    GjProgram dup(1,
                  {gj::Input{0}, gj::Const{2.0}, arith(ArithOp::Sub, 0, 1), arith(ArithOp::Sub, 0, 1),
                   gj::Cond{2, 0, 1}, gj::Cond{3, 1, 0}},
                  5);
    CHECK(gj_predicate_complexity(dup) == 2);
}

TEST_CASE("bound examples") {
    GjProgram quad(2,
                   {gj::Input{0}, gj::Input{1}, arith(ArithOp::Mul, 0, 1), gj::Cond{2, 0, 1}}, 3);
    REQUIRE(gj_degree(quad) == 2);
    REQUIRE(gj_predicate_complexity(quad) == 1);
    const auto r = gj_pdim_bound(quad, 2, 1.0);
    CHECK(r.bound_value == 2.0);
    CHECK(r.inputs.at("Delta") == 2.0);
    CHECK(r.inputs.at("Lambda") == 1.0);

    GjProgram lin(1, {gj::Input{0}}, 0);
    CHECK(gj_pdim_bound(lin, 3, 1.5).bound_value == doctest::Approx(4.5));

    // two distinct tests: Lambda 2
    GjProgram quad2(2,
                    {gj::Input{0}, gj::Input{1}, arith(ArithOp::Mul, 0, 1), gj::Cond{2, 0, 1},
                     gj::Cond{0, 1, 2}},
                    4);
    CHECK(gj_pdim_bound(quad2, 2).bound_value - gj_pdim_bound(quad, 2).bound_value ==
          doctest::Approx(2.0));
    CHECK_THROWS(gj_pdim_bound(quad, 0));
}

TEST_CASE("cycles and ordering") {
    std::vector<std::pair<std::size_t, GjNode>> cyc{
        {0, gj::Input{0}}, {1, arith(ArithOp::Add, 0, 2)}, {2, arith(ArithOp::Mul, 1, 0)}};
    CHECK_THROWS_AS(gj_from_labelled(1, cyc, 2), CycleError);

    std::vector<std::pair<std::size_t, GjNode>> shuffled{
        {1, arith(ArithOp::Add, 0, 0)}, {0, gj::Input{0}}};
    CHECK_THROWS_AS(gj_from_labelled(1, shuffled, 1), std::invalid_argument);

    std::vector<std::pair<std::size_t, GjNode>> ok{{0, gj::Input{0}}, {1, arith(ArithOp::Add, 0, 0)}};
    CHECK(gj_degree(gj_from_labelled(1, ok, 1)) == 1);

    CHECK_THROWS(GjProgram(1, {gj::Input{0}, arith(ArithOp::Add, 0, 1)}, 1));
    CHECK_THROWS(GjProgram(1, {gj::Input{3}}, 0));
}

TEST_CASE("tracked degree bounds the expanded degree") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 200; ++t) {
        const auto rp = random_program(rng, false);
        GjProgram prog(kInputs, rp.nodes, rp.nodes.size() - 1);
        REQUIRE(gj_degree(prog) >= rp.oracle_degree);
    }
}

TEST_CASE("tracked degree is exact for generic coefficients") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 200; ++t) {
        const auto rp = random_program(rng, true);
        GjProgram prog(kInputs, rp.nodes, rp.nodes.size() - 1);
        REQUIRE(gj_degree(prog) == rp.oracle_degree);
    }
}

TEST_CASE("predicate count ignores topological order") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 200; ++t) {
        const auto rp = random_program(rng, t % 2 == 0);
        GjProgram a(kInputs, rp.nodes, 0);
        GjProgram b(kInputs, reorder(rp.nodes, rng), 0);
        REQUIRE(gj_predicate_complexity(a) == gj_predicate_complexity(b));
        REQUIRE(gj_degree(a) == gj_degree(b));
    }
}

TEST_CASE("bound is monotone") {
    // chain x, x*x, x*x*x ... with k conditionals on distinct tests
    auto build = [](unsigned deg, unsigned conds) {
        std::vector<GjNode> nodes{gj::Input{0}};
        for (unsigned i = 1; i < deg; ++i) nodes.push_back(arith(ArithOp::Mul, i - 1, 0));
        const std::size_t top = nodes.size() - 1;
        for (unsigned k = 0; k < conds; ++k) nodes.push_back(gj::Cond{k % (top + 1), 0, 0});
        return GjProgram(1, nodes, 0);
    };
    for (unsigned deg = 1; deg <= 4; ++deg)
        for (unsigned conds = 0; conds <= 3; ++conds)
            for (std::size_t p = 1; p <= 3; ++p) {
                const double v = gj_pdim_bound(build(deg, conds), p).bound_value;
                if (deg < 4) CHECK(gj_pdim_bound(build(deg + 1, conds), p).bound_value >= v);
                if (conds < 3 && conds < deg)
                    CHECK(gj_pdim_bound(build(deg, conds + 1), p).bound_value >= v);
                CHECK(gj_pdim_bound(build(deg, conds), p + 1).bound_value >= v);
            }
}

TEST_CASE("json round trip") {
    GjProgram prog(2,
                   {gj::Input{0}, gj::Input{1}, arith(ArithOp::Div, 0, 1), gj::Const{0.5},
                    gj::Cond{2, 3, 0}},
                   4);
    const auto back = gj_from_json(json::parse(to_json(prog).dump()));
    CHECK(gj_degree(back) == gj_degree(prog));
    CHECK(gj_predicate_complexity(back) == 1);
    CHECK(back.nodes().size() == 5);
}
