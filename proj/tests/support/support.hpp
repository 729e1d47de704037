#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pdtune/regularization.hpp"

// Test-side instance generator, deliberately independent of the harness.
namespace testing_support {

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = n(rng);
    return M;
}

inline Eigen::VectorXd gaussian_vec(std::mt19937_64& rng, Eigen::Index n) {
    return gaussian(rng, n, 1).col(0);
}

inline pdtune::ProblemInstance random_instance(std::mt19937_64& rng, Eigen::Index m, Eigen::Index d,
                                               Eigen::Index m_val = -1) {
    if (m_val < 0) m_val = m;
    pdtune::ProblemInstance x;
    x.A = gaussian(rng, m, d);
    x.b = gaussian_vec(rng, m);
    x.A_val = gaussian(rng, m_val, d);
    x.b_val = gaussian_vec(rng, m_val);
    return x;
}

inline Eigen::VectorXd uniform_vec(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

}  // namespace testing_support
