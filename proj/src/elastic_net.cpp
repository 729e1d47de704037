#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdtune/errors.hpp"
#include "pdtune/regularization.hpp"

namespace pdtune {

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

void check_alphas(double a1, double a2) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw std::invalid_argument("elastic net needs alpha1, alpha2 > 0");
}

}  // namespace

double elastic_net_kkt_residual(const ProblemInstance& x, const Eigen::VectorXd& theta,
                                double alpha1, double alpha2) {
    const double m = static_cast<double>(x.A.rows());
    const Eigen::VectorXd grad =
        x.A.transpose() * (x.A * theta - x.b) / m + 2.0 * alpha2 * theta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        double v;
        if (theta(j) != 0.0) {
            v = std::abs(grad(j) + alpha1 * (theta(j) > 0 ? 1.0 : -1.0));
        } else {
            v = std::max(0.0, std::abs(grad(j)) - alpha1);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

RegionSolution elastic_net_solve(const ProblemInstance& x, double alpha1, double alpha2,
                                 const ElasticNetConfig& cfg) {
    x.validate();
    check_alphas(alpha1, alpha2);
    const Eigen::Index d = x.d();
    const double m = static_cast<double>(x.A.rows());
    const Eigen::MatrixXd G = x.A.transpose() * x.A / m;
    const Eigen::VectorXd c = x.A.transpose() * x.b / m;

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd best = theta;
    double best_kkt = elastic_net_kkt_residual(x, theta, alpha1, alpha2);

    RegionSolution out;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double rho = c(j) - G.row(j).dot(theta) + G(j, j) * theta(j);
            const double next = soft_threshold(rho, alpha1) / (G(j, j) + 2.0 * alpha2);
            max_change = std::max(max_change, std::abs(next - theta(j)));
            theta(j) = next;
        }
        const double kkt = elastic_net_kkt_residual(x, theta, alpha1, alpha2);
        if (kkt < best_kkt) {
            best_kkt = kkt;
            best = theta;
        }
        if (max_change < cfg.change_tol || kkt < cfg.kkt_tol) {
            out.theta = theta;
            out.kkt_residual = kkt;
            out.iterations = it;
            out.sign_pattern.entries.resize(static_cast<std::size_t>(d));
            for (Eigen::Index j = 0; j < d; ++j) {
                out.sign_pattern.entries[static_cast<std::size_t>(j)] =
                    sign_with_band(theta(j), cfg.zero_tol);
            }
            return out;
        }
    }
    throw ConvergenceError("elastic net coordinate descent did not converge",
                           std::vector<double>(best.data(), best.data() + best.size()), best_kkt);
}

SignPattern elastic_net_region(const ProblemInstance& x, double alpha1, double alpha2,
                               const ElasticNetConfig& cfg) {
    return elastic_net_solve(x, alpha1, alpha2, cfg).sign_pattern;
}

PiecewiseRationalPath elastic_net_path(const ProblemInstance& x, const DomainBox& alpha_box,
                                       double zero_tol) {
    x.validate();
    if (alpha_box.dim() != 2) throw DimensionError("elastic net path is over alpha = (a1, a2)");
    if (!(alpha_box.lo[0] > 0.0) || !(alpha_box.lo[1] > 0.0)) {
        throw std::invalid_argument("elastic net path domain must have alpha > 0");
    }
    const auto d = static_cast<std::size_t>(x.d());
    if (d > 8) throw std::invalid_argument("elastic net path enumerates 3^d regions; d <= 8");
    const double m = static_cast<double>(x.A.rows());
    const Eigen::MatrixXd G = x.A.transpose() * x.A / m;
    const Eigen::VectorXd c = x.A.transpose() * x.b / m;

    constexpr std::size_t nv = 2;
    const Polynomial a1 = Polynomial::variable(nv, 0);
    const Polynomial a2 = Polynomial::variable(nv, 1);
    const Polynomial one = Polynomial::constant(nv, 1.0);
    const Polynomial zero(nv);
    auto cst = [&](double v) { return Polynomial::constant(nv, v); };

    std::vector<RationalFunction> boundaries;
    std::vector<PathRegion> regions;

    std::size_t n_regions = 1;
    for (std::size_t i = 0; i < d; ++i) n_regions *= 3;
    std::vector<int> sigma(d);
    for (std::size_t code = 0; code < n_regions; ++code) {
        std::size_t rest = code;
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < d; ++i) {
            sigma[i] = static_cast<int>(rest % 3) - 1;
            rest /= 3;
            if (sigma[i] != 0) active.push_back(i);
        }
        const std::size_t k = active.size();

        // Active system (G_EE + 2 a2 I) theta_E = c_E - a1 sigma_E, by Cramer's rule.
        Polynomial det = one;
        std::vector<Polynomial> nums;
        if (k > 0) {
            std::vector<std::vector<Polynomial>> M(k, std::vector<Polynomial>(k, zero));
            std::vector<Polynomial> rhs;
            for (std::size_t r = 0; r < k; ++r) {
                for (std::size_t s = 0; s < k; ++s) {
                    const auto gi = static_cast<Eigen::Index>(active[r]);
                    const auto gj = static_cast<Eigen::Index>(active[s]);
                    M[r][s] = cst(G(gi, gj));
                    if (r == s) M[r][s] += 2.0 * a2;
                }
                rhs.push_back(cst(c(static_cast<Eigen::Index>(active[r]))) -
                              static_cast<double>(sigma[active[r]]) * a1);
            }
            det = determinant(M);
            for (std::size_t s = 0; s < k; ++s) {
                auto Ms = M;
                for (std::size_t r = 0; r < k; ++r) Ms[r][s] = rhs[r];
                nums.push_back(determinant(Ms));
            }
        }

        PathRegion region;
        region.value.assign(d, RationalFunction(zero, one));
        std::size_t next_active = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (sigma[j] != 0) {
                const Polynomial& num = nums[next_active++];
                region.value[j] = RationalFunction(num, det);
                boundaries.emplace_back(static_cast<double>(sigma[j]) * num, det);
            } else {
                // Correlation of the residual with feature j, times det.
                Polynomial corr = cst(c(static_cast<Eigen::Index>(j))) * det;
                for (std::size_t s = 0; s < k; ++s) {
                    corr -= G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(active[s])) *
                            nums[s];
                }
                boundaries.emplace_back(a1 * a1 * det * det - corr * corr, det * det);
            }
            region.support.push_back(boundaries.size() - 1);
            region.pattern.entries.push_back(1);
        }
        regions.push_back(std::move(region));
    }
    return PiecewiseRationalPath(std::move(boundaries), std::move(regions), d, alpha_box, zero_tol);
}

}  // namespace pdtune
