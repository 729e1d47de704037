#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "pdtune/errors.hpp"
#include "pdtune/regularization.hpp"

namespace pdtune {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_alpha(const FusedDualQp& qp, const VectorXd& alpha) {
    if (alpha.size() != qp.p()) {
        throw DimensionError("fused lasso needs d-1 = " + std::to_string(qp.p()) +
                             " weights, got " + std::to_string(alpha.size()));
    }
    for (Index i = 0; i < alpha.size(); ++i) {
        if (!(alpha(i) > 0.0)) throw std::invalid_argument("fused lasso weights must be > 0");
    }
}

// Minimizes 1/2 u'Qu - q'u over the free coordinates with the others fixed.
VectorXd solve_free(const FusedDualQp& qp, const std::vector<BoundStatus>& status,
                    const VectorXd& alpha) {
    const Index p = qp.p();
    VectorXd u = VectorXd::Zero(p);
    std::vector<Index> free;
    for (Index i = 0; i < p; ++i) {
        const auto s = status[static_cast<std::size_t>(i)];
        if (s == BoundStatus::Free) {
            free.push_back(i);
        } else {
            u(i) = static_cast<double>(static_cast<int>(s)) * alpha(i);
        }
    }
    if (free.empty()) return u;
    const auto nf = static_cast<Index>(free.size());
    MatrixXd Qff(nf, nf);
    VectorXd rhs(nf);
    for (Index r = 0; r < nf; ++r) {
        rhs(r) = qp.q(free[r]);
        for (Index j = 0; j < p; ++j) {
            if (status[static_cast<std::size_t>(j)] != BoundStatus::Free) rhs(r) -= qp.Q(free[r], j) * u(j);
        }
        for (Index s = 0; s < nf; ++s) Qff(r, s) = qp.Q(free[r], free[s]);
    }
    const VectorXd uf = Qff.llt().solve(rhs);
    for (Index r = 0; r < nf; ++r) u(free[r]) = uf(r);
    return u;
}

double quad(const FusedDualQp& qp, const VectorXd& u) {
    return 0.5 * u.dot(qp.Q * u) - qp.q.dot(u);
}

VectorXd project(const VectorXd& u, const VectorXd& alpha) {
    return u.cwiseMax(-alpha).cwiseMin(alpha);
}

std::vector<BoundStatus> classify(const VectorXd& u, const VectorXd& alpha, double tol) {
    std::vector<BoundStatus> s(static_cast<std::size_t>(u.size()), BoundStatus::Free);
    for (Index i = 0; i < u.size(); ++i) {
        if (u(i) >= alpha(i) - tol) {
            s[static_cast<std::size_t>(i)] = BoundStatus::Upper;
        } else if (u(i) <= -alpha(i) + tol) {
            s[static_cast<std::size_t>(i)] = BoundStatus::Lower;
        }
    }
    return s;
}

// Projected Newton: Newton step on the coordinates not held at a bound by
// their gradient, Armijo backtracking along the projection arc.
VectorXd projected_newton(const FusedDualQp& qp, const VectorXd& alpha, const FusedLassoConfig& cfg) {
    const Index p = qp.p();
    VectorXd u = project(qp.Q.llt().solve(qp.q), alpha);
    for (std::size_t it = 0; it < cfg.max_newton_iters; ++it) {
        const VectorXd g = qp.Q * u - qp.q;
        std::vector<BoundStatus> held(static_cast<std::size_t>(p), BoundStatus::Free);
        for (Index i = 0; i < p; ++i) {
            if (u(i) >= alpha(i) - cfg.active_tol && g(i) < 0) held[static_cast<std::size_t>(i)] = BoundStatus::Upper;
            if (u(i) <= -alpha(i) + cfg.active_tol && g(i) > 0) held[static_cast<std::size_t>(i)] = BoundStatus::Lower;
        }
        // Newton target on the free set with held coordinates pinned.
        VectorXd pinned = u;
        for (Index i = 0; i < p; ++i) {
            if (held[static_cast<std::size_t>(i)] != BoundStatus::Free) {
                pinned(i) = static_cast<double>(static_cast<int>(held[static_cast<std::size_t>(i)])) * alpha(i);
            }
        }
        const VectorXd target = solve_free(qp, held, alpha);
        const VectorXd dir = target - pinned;
        if (dir.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, alpha.lpNorm<Eigen::Infinity>())) {
            return project(target, alpha);
        }
        const double f0 = quad(qp, u);
        double t = 1.0;
        VectorXd next = project(pinned + dir, alpha);
        while (quad(qp, next) > f0 && t > 1e-12) {
            t *= 0.5;
            next = project(pinned + t * dir, alpha);
        }
        if ((next - u).lpNorm<Eigen::Infinity>() == 0.0) break;
        u = next;
    }
    return u;
}

// Feasible-point active-set method, started from the Newton result; finite
// termination, and the final iterate is an exact solve on its free set.
VectorXd active_set_refine(const FusedDualQp& qp, const VectorXd& alpha, VectorXd u,
                           const FusedLassoConfig& cfg) {
    const Index p = qp.p();
    std::vector<BoundStatus> work = classify(u, alpha, cfg.active_tol);
    for (Index i = 0; i < p; ++i) {
        const auto s = work[static_cast<std::size_t>(i)];
        if (s != BoundStatus::Free) u(i) = static_cast<double>(static_cast<int>(s)) * alpha(i);
    }
    for (std::size_t it = 0; it < cfg.max_active_set_iters; ++it) {
        const VectorXd target = solve_free(qp, work, alpha);
        // Largest feasible step toward the target.
        double step = 1.0;
        Index blocking = -1;
        for (Index i = 0; i < p; ++i) {
            if (work[static_cast<std::size_t>(i)] != BoundStatus::Free) continue;
            const double delta = target(i) - u(i);
            if (delta > 0 && target(i) > alpha(i)) {
                const double t = (alpha(i) - u(i)) / delta;
                if (t < step) { step = t; blocking = i; }
            } else if (delta < 0 && target(i) < -alpha(i)) {
                const double t = (-alpha(i) - u(i)) / delta;
                if (t < step) { step = t; blocking = i; }
            }
        }
        if (blocking >= 0) {
            step = std::max(step, 0.0);
            u += step * (target - u);
            const bool up = target(blocking) > u(blocking);
            work[static_cast<std::size_t>(blocking)] = up ? BoundStatus::Upper : BoundStatus::Lower;
            u(blocking) = up ? alpha(blocking) : -alpha(blocking);
            continue;
        }
        u = target;
        const VectorXd g = qp.Q * u - qp.q;
        double worst = 0.0;
        Index release = -1;
        const double gtol = 1e-13 * std::max(1.0, qp.q.lpNorm<Eigen::Infinity>());
        for (Index i = 0; i < p; ++i) {
            const auto s = work[static_cast<std::size_t>(i)];
            // Upper needs g <= 0, lower needs g >= 0.
            const double viol = s == BoundStatus::Upper ? g(i) : s == BoundStatus::Lower ? -g(i) : 0.0;
            if (viol > gtol && viol > worst) {
                worst = viol;
                release = i;
            }
        }
        if (release < 0) return u;
        work[static_cast<std::size_t>(release)] = BoundStatus::Free;
    }
    throw ConvergenceError("fused lasso active-set refinement did not terminate",
                           std::vector<double>(u.data(), u.data() + u.size()),
                           std::numeric_limits<double>::infinity());
}

DualSolution package(const FusedDualQp& qp, const ProblemInstance& x, const VectorXd& alpha,
                     VectorXd u, const FusedLassoConfig& cfg) {
    DualSolution sol;
    sol.active_set = classify(u, alpha, cfg.active_tol);
    sol.u = std::move(u);
    const VectorXd theta = fused_lasso_primal_recover(qp, sol.u);
    sol.duality_gap = fused_lasso_primal_objective(x, theta, alpha) - qp.dual_value(sol.u);
    return sol;
}

}  // namespace

MatrixXd difference_matrix(Index d) {
    if (d < 1) throw DimensionError("difference matrix needs d >= 1");
    MatrixXd D = MatrixXd::Zero(d - 1, d);
    for (Index i = 0; i + 1 < d; ++i) {
        D(i, i) = -1.0;
        D(i, i + 1) = 1.0;
    }
    return D;
}

double FusedDualQp::objective(const VectorXd& u) const {
    return 0.5 * (b_tilde - A_tilde * u).squaredNorm();
}

double FusedDualQp::dual_value(const VectorXd& u) const { return half_b_sq - objective(u); }

FusedDualQp fused_lasso_dual_qp(const ProblemInstance& x, const FusedLassoConfig& cfg) {
    x.validate();
    require_full_column_rank(x.A, cfg.rank_tol);
    const Index d = x.d();
    const MatrixXd G = x.A.transpose() * x.A;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    const VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
    const MatrixXd& V = es.eigenvectors();

    FusedDualQp qp;
    const MatrixXd G_inv_sqrt = V * inv_sqrt.asDiagonal() * V.transpose();
    qp.gram_inv = V * inv_sqrt.cwiseProduct(inv_sqrt).asDiagonal() * V.transpose();
    qp.D = difference_matrix(d);
    qp.Atb = x.A.transpose() * x.b;
    qp.A_tilde = G_inv_sqrt * qp.D.transpose();
    qp.b_tilde = G_inv_sqrt * qp.Atb;
    qp.Q = qp.A_tilde.transpose() * qp.A_tilde;
    qp.q = qp.A_tilde.transpose() * qp.b_tilde;
    qp.half_b_sq = 0.5 * x.b.squaredNorm();
    return qp;
}

DualSolution fused_lasso_dual_solve(const ProblemInstance& x, const VectorXd& alpha,
                                    const FusedLassoConfig& cfg) {
    return fused_lasso_dual_solve(fused_lasso_dual_qp(x, cfg), x, alpha, cfg);
}

DualSolution fused_lasso_dual_solve(const FusedDualQp& qp, const ProblemInstance& x,
                                    const VectorXd& alpha, const FusedLassoConfig& cfg) {
    check_alpha(qp, alpha);
    if (qp.p() == 0) return package(qp, x, alpha, VectorXd(0), cfg);
    VectorXd u = projected_newton(qp, alpha, cfg);
    u = active_set_refine(qp, alpha, std::move(u), cfg);
    DualSolution sol = package(qp, x, alpha, std::move(u), cfg);
    if (!(std::abs(sol.duality_gap) <= cfg.gap_tol)) {
        throw ConvergenceError("fused lasso duality gap " + std::to_string(sol.duality_gap) +
                                   " exceeds tolerance",
                               std::vector<double>(sol.u.data(), sol.u.data() + sol.u.size()),
                               sol.duality_gap);
    }
    return sol;
}

VectorXd fused_lasso_primal_recover(const ProblemInstance& x, const DualSolution& u,
                                    const FusedLassoConfig& cfg) {
    return fused_lasso_primal_recover(fused_lasso_dual_qp(x, cfg), u.u);
}

VectorXd fused_lasso_primal_recover(const FusedDualQp& qp, const VectorXd& u) {
    if (u.size() != qp.p()) throw DimensionError("dual vector must have d-1 entries");
    return qp.gram_inv * (qp.Atb - qp.D.transpose() * u);
}

double fused_lasso_primal_objective(const ProblemInstance& x, const VectorXd& theta,
                                    const VectorXd& alpha) {
    if (theta.size() != x.d()) throw DimensionError("theta length differs from d");
    if (alpha.size() != std::max<Index>(x.d() - 1, 0)) throw DimensionError("need d-1 weights");
    double pen = 0.0;
    for (Index i = 0; i < alpha.size(); ++i) pen += alpha(i) * std::abs(theta(i + 1) - theta(i));
    return 0.5 * (x.b - x.A * theta).squaredNorm() + pen;
}

DualSolution fused_lasso_brute_force(const ProblemInstance& x, const VectorXd& alpha,
                                     const FusedLassoConfig& cfg) {
    if (x.d() > 12) throw std::invalid_argument("brute force enumerates 3^(d-1) patterns; d <= 12");
    const FusedDualQp qp = fused_lasso_dual_qp(x, cfg);
    check_alpha(qp, alpha);
    const auto p = static_cast<std::size_t>(qp.p());
    std::size_t total = 1;
    for (std::size_t i = 0; i < p; ++i) total *= 3;

    const double gtol = 1e-9 * std::max(1.0, qp.q.lpNorm<Eigen::Infinity>());
    std::vector<BoundStatus> status(p);
    bool have_kkt = false;
    bool have_feasible = false;
    double best_kkt = std::numeric_limits<double>::infinity();
    double best_feasible = std::numeric_limits<double>::infinity();
    VectorXd u_kkt, u_feasible;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        for (std::size_t i = 0; i < p; ++i) {
            status[i] = static_cast<BoundStatus>(static_cast<int>(rest % 3) - 1);
            rest /= 3;
        }
        const VectorXd u = solve_free(qp, status, alpha);
        bool feasible = true;
        for (std::size_t i = 0; i < p; ++i) {
            if (std::abs(u(static_cast<Index>(i))) > alpha(static_cast<Index>(i)) + cfg.active_tol) feasible = false;
        }
        if (!feasible) continue;
        const double f = quad(qp, u);
        const VectorXd g = qp.Q * u - qp.q;
        bool kkt = true;
        for (std::size_t i = 0; i < p; ++i) {
            if (status[i] == BoundStatus::Upper && g(static_cast<Index>(i)) > gtol) kkt = false;
            if (status[i] == BoundStatus::Lower && g(static_cast<Index>(i)) < -gtol) kkt = false;
        }
        if (kkt && f < best_kkt) {
            best_kkt = f;
            u_kkt = u;
            have_kkt = true;
        }
        if (f < best_feasible) {
            best_feasible = f;
            u_feasible = u;
            have_feasible = true;
        }
    }
    if (!have_feasible) throw ConvergenceError("no feasible active-set pattern", {}, 0.0);
    return package(qp, x, alpha, have_kkt ? u_kkt : u_feasible, cfg);
}

PiecewiseRationalPath fused_lasso_dual_path(const ProblemInstance& x, const DomainBox& alpha_box,
                                            const FusedLassoConfig& cfg, double zero_tol) {
    const FusedDualQp qp = fused_lasso_dual_qp(x, cfg);
    const auto p = static_cast<std::size_t>(qp.p());
    if (p == 0) throw DimensionError("fused lasso path needs d >= 2");
    if (p > 9) throw std::invalid_argument("fused lasso path enumerates 3^(d-1) regions; d <= 10");
    if (alpha_box.dim() != p) throw DimensionError("alpha box must have d-1 dimensions");
    for (double lo : alpha_box.lo) {
        if (!(lo > 0.0)) throw std::invalid_argument("fused lasso path domain must have alpha > 0");
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < p; ++i) total *= 3;

    const Polynomial one = Polynomial::constant(p, 1.0);
    std::vector<RationalFunction> boundaries;
    std::vector<PathRegion> regions;
    std::vector<BoundStatus> status(p);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        std::vector<std::size_t> free, bound;
        for (std::size_t i = 0; i < p; ++i) {
            status[i] = static_cast<BoundStatus>(static_cast<int>(rest % 3) - 1);
            rest /= 3;
            (status[i] == BoundStatus::Free ? free : bound).push_back(i);
        }
        // u as an affine map of alpha: u = C alpha + e.
        MatrixXd C = MatrixXd::Zero(static_cast<Index>(p), static_cast<Index>(p));
        VectorXd e = VectorXd::Zero(static_cast<Index>(p));
        for (auto j : bound) {
            C(static_cast<Index>(j), static_cast<Index>(j)) = static_cast<double>(static_cast<int>(status[j]));
        }
        if (!free.empty()) {
            const auto nf = static_cast<Index>(free.size());
            MatrixXd Qff(nf, nf);
            for (Index r = 0; r < nf; ++r) {
                for (Index s = 0; s < nf; ++s) Qff(r, s) = qp.Q(static_cast<Index>(free[r]), static_cast<Index>(free[s]));
            }
            const auto llt = Qff.llt();
            MatrixXd rhsC = MatrixXd::Zero(nf, static_cast<Index>(p));
            VectorXd rhse(nf);
            for (Index r = 0; r < nf; ++r) {
                const auto fr = static_cast<Index>(free[r]);
                rhse(r) = qp.q(fr);
                for (auto j : bound) {
                    const auto jj = static_cast<Index>(j);
                    rhsC(r, jj) -= qp.Q(fr, jj) * C(jj, jj);
                }
            }
            const MatrixXd Cf = llt.solve(rhsC);
            const VectorXd ef = llt.solve(rhse);
            for (Index r = 0; r < nf; ++r) {
                C.row(static_cast<Index>(free[r])) = Cf.row(r);
                e(static_cast<Index>(free[r])) = ef(r);
            }
        }
        const MatrixXd gC = qp.Q * C;
        const VectorXd ge = qp.Q * e - qp.q;

        auto affine = [&](const Eigen::RowVectorXd& coef, double c0) {
            Polynomial poly = Polynomial::constant(p, c0);
            for (std::size_t k = 0; k < p; ++k) {
                if (coef(static_cast<Index>(k)) != 0.0) {
                    poly += coef(static_cast<Index>(k)) * Polynomial::variable(p, k);
                }
            }
            return poly;
        };

        PathRegion region;
        for (std::size_t i = 0; i < p; ++i) {
            const auto ii = static_cast<Index>(i);
            const Polynomial ui = affine(C.row(ii), e(ii));
            region.value.emplace_back(ui, one);
            const Polynomial ai = Polynomial::variable(p, i);
            if (status[i] == BoundStatus::Free) {
                boundaries.emplace_back(ai - ui, one);
                region.support.push_back(boundaries.size() - 1);
                boundaries.emplace_back(ai + ui, one);
                region.support.push_back(boundaries.size() - 1);
            } else {
                const Polynomial gi = affine(gC.row(ii), ge(ii));
                const double s = static_cast<double>(static_cast<int>(status[i]));
                boundaries.emplace_back(-s * gi, one);
                region.support.push_back(boundaries.size() - 1);
            }
        }
        region.pattern.entries.assign(region.support.size(), 1);
        regions.push_back(std::move(region));
    }
    return PiecewiseRationalPath(std::move(boundaries), std::move(regions), p, alpha_box, zero_tol);
}

}  // namespace pdtune
