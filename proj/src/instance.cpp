#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "pdtune/errors.hpp"
#include "pdtune/regularization.hpp"

namespace pdtune {

void ProblemInstance::validate() const {
    if (A.rows() < 1 || A.cols() < 1) throw DimensionError("training design must be non-empty");
    if (b.size() != A.rows()) throw DimensionError("b must have one entry per row of A");
    if (A_val.cols() != A.cols()) {
        throw DimensionError("A and A_val must have the same number of columns (" +
                             std::to_string(A.cols()) + " vs " + std::to_string(A_val.cols()) + ")");
    }
    if (b_val.size() != A_val.rows()) throw DimensionError("b_val must have one entry per row of A_val");
}

void require_full_column_rank(const Eigen::MatrixXd& A, double rank_tol) {
    if (A.rows() < A.cols()) {
        throw RankDeficientError("A has fewer rows than columns and cannot have full column rank");
    }
    // Singular values of A itself; going through A^T A would square the
    // condition number and hide near-dependent columns.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv.maxCoeff() : 0.0;
    const double smin = sv.size() ? sv.minCoeff() : 0.0;
    if (!(smin > rank_tol * smax)) {
        throw RankDeficientError("A is rank deficient (sigma_min = " + std::to_string(smin) +
                                 ", sigma_max = " + std::to_string(smax) + ")");
    }
}

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::ElasticNet: return "elastic";
        case ProblemKind::FusedLasso: return "fused";
        case ProblemKind::GroupLasso: return "group";
    }
    return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& s) {
    if (s == "elastic" || s == "elastic_net") return ProblemKind::ElasticNet;
    if (s == "fused" || s == "fused_lasso") return ProblemKind::FusedLasso;
    if (s == "group" || s == "group_lasso") return ProblemKind::GroupLasso;
    throw std::invalid_argument("unknown problem kind '" + s + "'");
}

double validation_loss(const ProblemInstance& x, const Eigen::VectorXd& theta, ProblemKind kind) {
    if (theta.size() != x.A_val.cols()) throw DimensionError("theta length differs from d");
    const double sq = (x.A_val * theta - x.b_val).squaredNorm();
    switch (kind) {
        case ProblemKind::GroupLasso: return sq;
        case ProblemKind::FusedLasso: return 0.5 * sq;
        case ProblemKind::ElasticNet: return sq / (2.0 * static_cast<double>(x.A_val.rows()));
    }
    return sq;
}

}  // namespace pdtune
