#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdtune/piecewise.hpp"

namespace pdtune {

/// x = (A, b, A_val, b_val): a training design/target and a validation
/// design/target over the same d features.
struct ProblemInstance {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::MatrixXd A_val;
    Eigen::VectorXd b_val;

    Eigen::Index d() const noexcept { return A.cols(); }
    /// Shape checks; throws DimensionError.
    void validate() const;
};

inline constexpr double kDefaultRankTol = 1e-10;

/// Throws RankDeficientError unless sigma_min(A) > rank_tol * sigma_max(A).
void require_full_column_rank(const Eigen::MatrixXd& A, double rank_tol = kDefaultRankTol);

enum class ProblemKind { ElasticNet, FusedLasso, GroupLasso };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& s);

/// Squared validation residual with the objective's own scaling:
/// group ||A'theta - b'||^2, fused 1/2 ||.||^2, elastic net 1/(2m') ||.||^2.
double validation_loss(const ProblemInstance& x, const Eigen::VectorXd& theta, ProblemKind kind);

// ---------------------------------------------------------------- elastic net

struct ElasticNetConfig {
    double change_tol = 1e-10;
    double kkt_tol = 1e-8;
    std::size_t max_iters = 100000;
    double zero_tol = kDefaultZeroTol;
};

struct RegionSolution {
    Eigen::VectorXd theta;
    SignPattern sign_pattern;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
};

/// argmin (1/2m)||b - A theta||^2 + a1 ||theta||_1 + a2 ||theta||_2^2 by cyclic
/// coordinate descent with exact soft-threshold updates.
RegionSolution elastic_net_solve(const ProblemInstance& x, double alpha1, double alpha2,
                                 const ElasticNetConfig& cfg = {});

SignPattern elastic_net_region(const ProblemInstance& x, double alpha1, double alpha2,
                               const ElasticNetConfig& cfg = {});

/// Max violation of the subgradient optimality conditions at theta.
double elastic_net_kkt_residual(const ProblemInstance& x, const Eigen::VectorXd& theta,
                                double alpha1, double alpha2);

/// Exact piecewise rational path alpha = (a1, a2) -> theta*. One region per
/// sign pattern in {-1,0,1}^d; each region is certified by d rational
/// functions (signed active coefficients, and a1^2 - c_j^2 for the inactive
/// correlations c_j) that are all positive inside it.
PiecewiseRationalPath elastic_net_path(const ProblemInstance& x, const DomainBox& alpha_box,
                                       double zero_tol = kDefaultZeroTol);

// ---------------------------------------------------------------- fused lasso

enum class BoundStatus : std::int8_t { Lower = -1, Free = 0, Upper = 1 };

struct DualSolution {
    Eigen::VectorXd u;
    std::vector<BoundStatus> active_set;
    double duality_gap = 0.0;
};

struct FusedLassoConfig {
    double active_tol = 1e-9;
    double rank_tol = kDefaultRankTol;
    double gap_tol = 1e-7;
    std::size_t max_newton_iters = 100;
    std::size_t max_active_set_iters = 1000;
};

/// (d-1) x d first-difference matrix, rows (.., -1, 1, ..).
Eigen::MatrixXd difference_matrix(Eigen::Index d);

/// Dual data of the weighted fused lasso:
///   min_u 1/2 ||b~ - A~ u||^2  s.t. |u_i| <= alpha_i
/// with A~ = (A^T A)^{-1/2} D^T, b~ = (A^T A)^{-1/2} A^T b. Q and q are the
/// normal-equation form Q = A~^T A~, q = A~^T b~.
struct FusedDualQp {
    Eigen::MatrixXd A_tilde;
    Eigen::VectorXd b_tilde;
    Eigen::MatrixXd Q;
    Eigen::VectorXd q;
    Eigen::MatrixXd gram_inv;
    Eigen::VectorXd Atb;
    Eigen::MatrixXd D;
    double half_b_sq = 0.0;

    Eigen::Index p() const noexcept { return Q.rows(); }
    /// 1/2 ||b~ - A~ u||^2.
    double objective(const Eigen::VectorXd& u) const;
    /// Value of the Lagrange dual function, 1/2 ||b||^2 - objective(u).
    double dual_value(const Eigen::VectorXd& u) const;
};

FusedDualQp fused_lasso_dual_qp(const ProblemInstance& x, const FusedLassoConfig& cfg = {});

DualSolution fused_lasso_dual_solve(const ProblemInstance& x, const Eigen::VectorXd& alpha,
                                    const FusedLassoConfig& cfg = {});
DualSolution fused_lasso_dual_solve(const FusedDualQp& qp, const ProblemInstance& x,
                                    const Eigen::VectorXd& alpha, const FusedLassoConfig& cfg = {});

/// theta = (A^T A)^{-1} (A^T b - D^T u).
Eigen::VectorXd fused_lasso_primal_recover(const ProblemInstance& x, const DualSolution& u,
                                           const FusedLassoConfig& cfg = {});
Eigen::VectorXd fused_lasso_primal_recover(const FusedDualQp& qp, const Eigen::VectorXd& u);

/// 1/2 ||b - A theta||^2 + sum_i alpha_i |theta_{i+1} - theta_i|.
double fused_lasso_primal_objective(const ProblemInstance& x, const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& alpha);

/// Enumerates all 3^(d-1) active-set patterns; d <= 12.
DualSolution fused_lasso_brute_force(const ProblemInstance& x, const Eigen::VectorXd& alpha,
                                     const FusedLassoConfig& cfg = {});

/// Piecewise affine dual path alpha -> u*(alpha), one region per active-set
/// pattern in {lower, free, upper}^(d-1).
PiecewiseRationalPath fused_lasso_dual_path(const ProblemInstance& x, const DomainBox& alpha_box,
                                            const FusedLassoConfig& cfg = {},
                                            double zero_tol = kDefaultZeroTol);

// ---------------------------------------------------------------- group lasso

struct GroupLassoConfig {
    double kkt_tol = 1e-6;
    std::size_t max_iters = 500000;
    bool record_objective = false;
};

struct GroupLassoResult {
    Eigen::VectorXd theta;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    /// Objective after each iteration (first entry: starting point), when recorded.
    std::vector<double> objective_trace;
};

/// argmin ||A theta - b||^2 + sum_i alpha_i ||theta_i||_2 over contiguous
/// blocks of sizes block_dims, by proximal gradient with step 1/(2 lambda_max(A^T A)).
GroupLassoResult group_lasso_solve(const ProblemInstance& x, const Eigen::VectorXd& alpha,
                                   const std::vector<std::size_t>& block_dims,
                                   const GroupLassoConfig& cfg = {});

double group_lasso_objective(const ProblemInstance& x, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& alpha,
                             const std::vector<std::size_t>& block_dims);

double group_lasso_kkt_residual(const ProblemInstance& x, const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& alpha,
                                const std::vector<std::size_t>& block_dims);

}  // namespace pdtune
