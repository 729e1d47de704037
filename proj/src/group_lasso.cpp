#include <algorithm>
#include <cmath>
#include <numeric>
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

std::vector<Index> block_starts(const ProblemInstance& x, const VectorXd& alpha,
                                const std::vector<std::size_t>& block_dims) {
    if (block_dims.empty()) throw DimensionError("group lasso needs at least one block");
    if (static_cast<Index>(block_dims.size()) != alpha.size()) {
        throw DimensionError("one weight per block is required");
    }
    std::vector<Index> starts;
    Index at = 0;
    for (auto b : block_dims) {
        if (b == 0) throw DimensionError("empty group lasso block");
        starts.push_back(at);
        at += static_cast<Index>(b);
    }
    if (at != x.d()) {
        throw DimensionError("block sizes sum to " + std::to_string(at) + " but d = " + std::to_string(x.d()));
    }
    return starts;
}

double kkt_from_grad(const VectorXd& theta, const VectorXd& grad, const VectorXd& alpha,
                     const std::vector<std::size_t>& dims, const std::vector<Index>& starts) {
    double worst = 0.0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const auto n = static_cast<Index>(dims[i]);
        const auto t = theta.segment(starts[i], n);
        const auto g = grad.segment(starts[i], n);
        const double norm = t.norm();
        const double a = alpha(static_cast<Index>(i));
        const double v = norm > 0.0 ? (g + a * t / norm).norm() : std::max(0.0, g.norm() - a);
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

double group_lasso_objective(const ProblemInstance& x, const VectorXd& theta, const VectorXd& alpha,
                             const std::vector<std::size_t>& block_dims) {
    const auto starts = block_starts(x, alpha, block_dims);
    double pen = 0.0;
    for (std::size_t i = 0; i < block_dims.size(); ++i) {
        pen += alpha(static_cast<Index>(i)) *
               theta.segment(starts[i], static_cast<Index>(block_dims[i])).norm();
    }
    return (x.A * theta - x.b).squaredNorm() + pen;
}

double group_lasso_kkt_residual(const ProblemInstance& x, const VectorXd& theta, const VectorXd& alpha,
                                const std::vector<std::size_t>& block_dims) {
    const auto starts = block_starts(x, alpha, block_dims);
    const VectorXd grad = 2.0 * x.A.transpose() * (x.A * theta - x.b);
    return kkt_from_grad(theta, grad, alpha, block_dims, starts);
}

GroupLassoResult group_lasso_solve(const ProblemInstance& x, const VectorXd& alpha,
                                   const std::vector<std::size_t>& block_dims,
                                   const GroupLassoConfig& cfg) {
    x.validate();
    const auto starts = block_starts(x, alpha, block_dims);
    for (Index i = 0; i < alpha.size(); ++i) {
        if (!(alpha(i) > 0.0)) throw std::invalid_argument("group lasso weights must be > 0");
    }
    const MatrixXd G = x.A.transpose() * x.A;
    const VectorXd c = x.A.transpose() * x.b;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();

    GroupLassoResult out;
    VectorXd theta = VectorXd::Zero(x.d());
    auto objective = [&](const VectorXd& t) {
        // ||A t - b||^2 = t'Gt - 2c't + ||b||^2
        double pen = 0.0;
        for (std::size_t i = 0; i < block_dims.size(); ++i) {
            pen += alpha(static_cast<Index>(i)) * t.segment(starts[i], static_cast<Index>(block_dims[i])).norm();
        }
        return t.dot(G * t) - 2.0 * c.dot(t) + x.b.squaredNorm() + pen;
    };
    if (cfg.record_objective) out.objective_trace.push_back(objective(theta));

    VectorXd grad = 2.0 * (G * theta - c);
    double kkt = kkt_from_grad(theta, grad, alpha, block_dims, starts);
    if (kkt < cfg.kkt_tol || lmax <= 0.0) {
        out.theta = theta;
        out.kkt_residual = kkt;
        return out;
    }
    const double step = 1.0 / (2.0 * lmax);
    VectorXd best = theta;
    double best_kkt = kkt;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        VectorXd z = theta - step * grad;
        for (std::size_t i = 0; i < block_dims.size(); ++i) {
            auto blk = z.segment(starts[i], static_cast<Index>(block_dims[i]));
            const double norm = blk.norm();
            const double thr = step * alpha(static_cast<Index>(i));
            if (norm <= thr) {
                blk.setZero();
            } else {
                blk *= (1.0 - thr / norm);
            }
        }
        theta = std::move(z);
        grad = 2.0 * (G * theta - c);
        kkt = kkt_from_grad(theta, grad, alpha, block_dims, starts);
        if (cfg.record_objective) out.objective_trace.push_back(objective(theta));
        if (kkt < best_kkt) {
            best_kkt = kkt;
            best = theta;
        }
        if (kkt < cfg.kkt_tol) {
            out.theta = theta;
            out.kkt_residual = kkt;
            out.iterations = it;
            return out;
        }
    }
    throw ConvergenceError("group lasso proximal gradient did not converge",
                           std::vector<double>(best.data(), best.data() + best.size()), best_kkt);
}

}  // namespace pdtune
