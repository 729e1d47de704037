#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "pdtune/errors.hpp"
#include "pdtune/regularization.hpp"
#include "support.hpp"

using namespace pdtune;
using testing_support::random_instance;
using testing_support::uniform_vec;

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXd ols(const ProblemInstance& x) { return (x.A.transpose() * x.A).ldlt().solve(x.A.transpose() * x.b); }

// (A_E^T A_E / m + 2 a2 I)^{-1} (A_E^T b / m - a1 sigma_E) on the solver's support.
Eigen::VectorXd elastic_closed_form(const ProblemInstance& x, const SignPattern& s, double a1, double a2) {
    const double m = static_cast<double>(x.A.rows());
    std::vector<Eigen::Index> E;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] != 0) E.push_back(static_cast<Eigen::Index>(i));
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(x.d());
    if (E.empty()) return theta;
    const auto k = static_cast<Eigen::Index>(E.size());
    Eigen::MatrixXd AE(x.A.rows(), k);
    Eigen::VectorXd sig(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        AE.col(j) = x.A.col(E[j]);
        sig(j) = s[static_cast<std::size_t>(E[j])];
    }
    const Eigen::MatrixXd H = AE.transpose() * AE / m + 2 * a2 * Eigen::MatrixXd::Identity(k, k);
    const Eigen::VectorXd sol = H.ldlt().solve(AE.transpose() * x.b / m - a1 * sig);
    for (Eigen::Index j = 0; j < k; ++j) theta(E[j]) = sol(j);
    return theta;
}

}  // namespace

TEST_CASE("validation loss") {
    ProblemInstance x;
    x.A = Eigen::MatrixXd::Identity(2, 2);
    x.b = Eigen::VectorXd::Zero(2);
    x.A_val = Eigen::MatrixXd::Identity(2, 2);
    x.b_val = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd theta(2);
    theta << 3, 4;
    CHECK(validation_loss(x, theta, ProblemKind::FusedLasso) == 12.5);
    CHECK(validation_loss(x, theta, ProblemKind::GroupLasso) == 25.0);
    CHECK(validation_loss(x, theta, ProblemKind::ElasticNet) == 25.0 / 4.0);
    x.b_val = theta;
    CHECK(validation_loss(x, theta, ProblemKind::GroupLasso) == 0.0);
    Eigen::VectorXd bad(3);
    CHECK_THROWS_AS(validation_loss(x, bad, ProblemKind::GroupLasso), DimensionError);
}

TEST_CASE("kind names") {
    CHECK(problem_kind_from_string("fused") == ProblemKind::FusedLasso);
    CHECK(problem_kind_from_string("group_lasso") == ProblemKind::GroupLasso);
    CHECK(problem_kind_from_string("elastic") == ProblemKind::ElasticNet);
    CHECK_THROWS(problem_kind_from_string("ridge"));
}

TEST_CASE("elastic net trivial cases") {
    std::mt19937_64 rng(51);
    auto x = random_instance(rng, 15, 4);
    auto z = x;
    z.b.setZero();
    auto sol = elastic_net_solve(z, 0.1, 0.2);
    CHECK(max_abs(sol.theta) == 0.0);
    CHECK(sol.sign_pattern == SignPattern{0, 0, 0, 0});
    CHECK(elastic_net_region(z, 0.1, 0.2) == SignPattern{0, 0, 0, 0});

    const double thr = max_abs(x.A.transpose() * x.b / 15.0);
    sol = elastic_net_solve(x, thr * 1.001, 0.05);
    CHECK(max_abs(sol.theta) == 0.0);
    CHECK_THROWS(elastic_net_solve(x, 0.0, 0.1));
    CHECK_THROWS(elastic_net_solve(x, 0.1, -1.0));
}

TEST_CASE("elastic net matches the per-region closed form") {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> a(0.005, 0.5);
    for (int t = 0; t < 200; ++t) {
        auto x = random_instance(rng, 20, 4);
        const double a1 = a(rng), a2 = a(rng);
        const auto sol = elastic_net_solve(x, a1, a2);
        const auto cf = elastic_closed_form(x, sol.sign_pattern, a1, a2);
        REQUIRE(max_abs(sol.theta - cf) <= 1e-6);
        REQUIRE(elastic_net_kkt_residual(x, sol.theta, a1, a2) <= 1e-7);
        for (std::size_t i = 0; i < 4; ++i) {
            const double v = sol.theta(static_cast<Eigen::Index>(i));
            REQUIRE(sol.sign_pattern[i] == (std::abs(v) <= 1e-10 ? 0 : (v > 0 ? 1 : -1)));
        }
    }
}

TEST_CASE("elastic net region count and local constancy") {
    std::mt19937_64 rng(53);
    auto x = random_instance(rng, 20, 4);
    std::set<SignPattern> seen;
    int unchanged = 0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const double a1 = 0.002 * std::pow(300.0, i / 99.0);
            const double a2 = 0.002 * std::pow(300.0, j / 99.0);
            const auto s = elastic_net_region(x, a1, a2);
            seen.insert(s);
            if (j % 10 == 0) unchanged += s == elastic_net_region(x, a1 + 1e-9, a2);
        }
    CHECK(seen.size() <= 81);
    CHECK(seen.size() >= 3);
    CHECK(unchanged >= 995);
}

TEST_CASE("elastic net is deterministic") {
    std::mt19937_64 rng(54);
    auto x = random_instance(rng, 20, 5);
    const auto a = elastic_net_solve(x, 0.05, 0.1), b = elastic_net_solve(x, 0.05, 0.1);
    CHECK(a.theta == b.theta);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("elastic net path pattern count") {
    std::mt19937_64 rng(55);
    auto x = random_instance(rng, 20, 2);
    const auto path = elastic_net_path(x, DomainBox({0.01, 0.01}, {1.0, 1.0}));
    CHECK(path.regions().size() == 9);
    CHECK(path.p() == 2);
    CHECK(path.d() == 2);
    CHECK_THROWS(elastic_net_path(random_instance(rng, 30, 9), DomainBox({0.01, 0.01}, {1.0, 1.0})));
}

TEST_CASE("fused lasso small closed example") {
    ProblemInstance x;
    x.A = Eigen::MatrixXd::Identity(2, 2);
    x.b = Eigen::Vector2d(1, 3);
    x.A_val = x.A;
    x.b_val = x.b;
    Eigen::VectorXd alpha(1);
    alpha << 0.5;
    const auto u = fused_lasso_dual_solve(x, alpha);
    const auto theta = fused_lasso_primal_recover(x, u);
    CHECK(theta(0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(theta(1) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(u.active_set[0] == BoundStatus::Upper);

    // dense scan of the primal over theta in [0, 4]^2
    double best = 1e300;
    Eigen::Vector2d arg;
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j <= 400; ++j) {
            const Eigen::Vector2d t(i * 0.01, j * 0.01);
            const double v = fused_lasso_primal_objective(x, t, alpha);
            if (v < best) best = v, arg = t;
        }
    CHECK(std::abs(arg(0) - 1.5) <= 0.01);
    CHECK(std::abs(arg(1) - 2.5) <= 0.01);
}

TEST_CASE("fused lasso limits") {
    std::mt19937_64 rng(56);
    auto x = random_instance(rng, 12, 5);
    const auto qp = fused_lasso_dual_qp(x);
    const Eigen::VectorXd free_u = qp.Q.ldlt().solve(qp.q);
    Eigen::VectorXd big = Eigen::VectorXd::Constant(4, 2 * max_abs(free_u) + 1);
    auto s = fused_lasso_dual_solve(x, big);
    CHECK(max_abs(s.u - free_u) <= 1e-10);
    for (auto st : s.active_set) CHECK(st == BoundStatus::Free);

    Eigen::VectorXd tiny = Eigen::VectorXd::Constant(4, 1e-9);
    s = fused_lasso_dual_solve(x, tiny);
    CHECK(max_abs(s.u) <= 1e-9 + 1e-12);
    CHECK(max_abs(fused_lasso_primal_recover(x, s) - ols(x)) <= 1e-7);

    DualSolution zero{Eigen::VectorXd::Zero(4), {}, 0.0};
    CHECK(max_abs(fused_lasso_primal_recover(x, zero) - ols(x)) <= 1e-10);
}

TEST_CASE("fused lasso rejects rank deficient designs") {
    std::mt19937_64 rng(57);
    auto x = random_instance(rng, 3, 5);
    Eigen::VectorXd alpha = Eigen::VectorXd::Constant(4, 0.5);
    CHECK_THROWS_AS(fused_lasso_dual_solve(x, alpha), RankDeficientError);
    auto y = random_instance(rng, 10, 3);
    y.A.col(2) = y.A.col(0);
    CHECK_THROWS_AS(require_full_column_rank(y.A), RankDeficientError);
    CHECK_THROWS_AS(fused_lasso_dual_solve(y, Eigen::VectorXd::Constant(2, 0.5)), RankDeficientError);
    auto z = random_instance(rng, 10, 3);
    CHECK_THROWS(fused_lasso_dual_solve(z, Eigen::VectorXd::Constant(3, 0.5)));
    CHECK_THROWS(fused_lasso_dual_solve(z, Eigen::VectorXd::Constant(2, -0.5)));
}

TEST_CASE("strong duality on 200 instances") {
    std::mt19937_64 rng(58);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index d = 2 + t % 7;
        auto x = random_instance(rng, d + 6, d);
        const Eigen::VectorXd alpha = uniform_vec(rng, d - 1, 0.01, 3.0);
        const auto qp = fused_lasso_dual_qp(x);
        const auto s = fused_lasso_dual_solve(qp, x, alpha);
        const auto theta = fused_lasso_primal_recover(qp, s.u);
        const double gap = fused_lasso_primal_objective(x, theta, alpha) - qp.dual_value(s.u);
        REQUIRE(std::abs(gap) <= 1e-7);
        REQUIRE(std::abs(s.duality_gap) <= 1e-7);
        for (Eigen::Index i = 0; i < d - 1; ++i) REQUIRE(std::abs(s.u(i)) <= alpha(i) + 1e-9);
    }
}

TEST_CASE("brute force agrees with the dual solver") {
    std::mt19937_64 rng(59);
    for (Eigen::Index d = 2; d <= 6; ++d)
        for (int t = 0; t < 40; ++t) {
            auto x = random_instance(rng, d + 5, d);
            const Eigen::VectorXd alpha = uniform_vec(rng, d - 1, 0.01, 3.0);
            const auto a = fused_lasso_dual_solve(x, alpha);
            const auto b = fused_lasso_brute_force(x, alpha);
            REQUIRE(max_abs(a.u - b.u) <= 1e-7);
            REQUIRE(a.active_set == b.active_set);
        }
    auto big = random_instance(rng, 20, 13);
    CHECK_THROWS(fused_lasso_brute_force(big, Eigen::VectorXd::Constant(12, 1.0)));
}

TEST_CASE("dual solution is affine inside a stable active set") {
    std::mt19937_64 rng(60);
    int tested = 0;
    for (int t = 0; t < 50; ++t) {
        auto x = random_instance(rng, 10, 4);
        const auto qp = fused_lasso_dual_qp(x);
        const Eigen::VectorXd a0 = uniform_vec(rng, 3, 0.05, 2.0);
        const Eigen::VectorXd dir = uniform_vec(rng, 3, -1.0, 1.0).normalized();
        const double h = 1e-3;
        const auto s0 = fused_lasso_dual_solve(qp, x, a0);
        const auto s1 = fused_lasso_dual_solve(qp, x, a0 + h * dir);
        const auto s2 = fused_lasso_dual_solve(qp, x, a0 + 2 * h * dir);
        if (s0.active_set != s1.active_set || s1.active_set != s2.active_set) continue;
        ++tested;
        REQUIRE(max_abs((s1.u - s0.u) - (s2.u - s1.u)) <= 1e-8);
    }
    CHECK(tested >= 40);
}

TEST_CASE("fused dual path matches the solver") {
    std::mt19937_64 rng(61);
    auto x = random_instance(rng, 10, 4);
    const auto box = DomainBox::cube(3, 0.01, 3.0);
    const auto path = fused_lasso_dual_path(x, box);
    for (int t = 0; t < 100; ++t) {
        const auto al = box.sample(rng);
        const Eigen::Map<const Eigen::VectorXd> a(al.data(), 3);
        const auto u = path_eval(path, al);
        const auto s = fused_lasso_dual_solve(x, a);
        for (int i = 0; i < 3; ++i) REQUIRE(std::abs(u[i] - s.u(i)) <= 1e-8);
    }
    CHECK(path.complexity().Delta <= 1);
}

TEST_CASE("group lasso trivial cases") {
    std::mt19937_64 rng(62);
    auto x = random_instance(rng, 20, 9);
    const std::vector<std::size_t> blocks{3, 3, 3};
    auto z = x;
    z.b.setZero();
    CHECK(max_abs(group_lasso_solve(z, Eigen::Vector3d(1, 1, 1), blocks).theta) == 0.0);

    Eigen::VectorXd alpha(3);
    for (int i = 0; i < 3; ++i) alpha(i) = 2.0 * (x.A.middleCols(3 * i, 3).transpose() * x.b).norm() * 1.0001;
    CHECK(max_abs(group_lasso_solve(x, alpha, blocks).theta) == 0.0);

    CHECK_THROWS(group_lasso_solve(x, alpha, {3, 3}));
    CHECK_THROWS(group_lasso_solve(x, Eigen::Vector2d(1, 1), blocks));
}

TEST_CASE("scalar group lasso is the soft threshold") {
    std::mt19937_64 rng(63);
    for (int t = 0; t < 50; ++t) {
        auto x = random_instance(rng, 12, 1);
        const double ab = x.A.col(0).dot(x.b), aa = x.A.col(0).squaredNorm();
        const double alpha = std::uniform_real_distribution<double>(0.01, 2.5 * std::abs(ab))(rng);
        const double s = std::copysign(std::max(std::abs(ab) - alpha / 2.0, 0.0), ab);
        const auto r = group_lasso_solve(x, Eigen::VectorXd::Constant(1, alpha), {1});
        REQUIRE(std::abs(r.theta(0) - s / aa) <= 1e-8);
    }
}

TEST_CASE("group lasso optimality and monotone descent") {
    std::mt19937_64 rng(64);
    GroupLassoConfig cfg;
    cfg.record_objective = true;
    const std::vector<std::size_t> blocks{3, 3, 3};
    for (int t = 0; t < 100; ++t) {
        auto x = random_instance(rng, 20, 9);
        const Eigen::VectorXd alpha = uniform_vec(rng, 3, 0.1, 20.0);
        const auto r = group_lasso_solve(x, alpha, blocks, cfg);
        REQUIRE(r.kkt_residual <= 1e-6);
        REQUIRE(group_lasso_kkt_residual(x, r.theta, alpha, blocks) <= 1e-6);
        REQUIRE(r.objective_trace.size() == r.iterations + 1);
        for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
            REQUIRE(r.objective_trace[k] <= r.objective_trace[k - 1] * (1 + 1e-12));
    }
}
