#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdtune/regularization.hpp"

namespace pdtune {

/// splitmix64 finalizer; every derived seed in the harness goes through it.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
/// Independent stream `stream` of `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

enum class DistributionKind { GaussianDense, PiecewiseConstant, GroupSparse };

std::string to_string(DistributionKind k);
DistributionKind distribution_kind_from_string(const std::string& s);

/// Synthetic instance distribution. Each instance draws its own ground truth
/// theta_true, then Gaussian training and validation designs whose targets
/// share that truth and carry independent noise.
struct DistributionSpec {
    DistributionKind kind = DistributionKind::PiecewiseConstant;
    std::size_t m = 20;
    std::size_t m_val = 20;
    std::size_t d = 5;
    double noise_std = 1.0;
    double signal_scale = 1.0;
    /// gaussian-dense: nonzero coefficients (0 means d / 2, at least 1).
    std::size_t n_active = 0;
    /// piecewise-constant: number of change points in theta_true.
    std::size_t n_changepoints = 1;
    /// group-sparse: block sizes (empty means blocks of size 3) and active blocks.
    std::vector<std::size_t> block_dims;
    std::size_t active_blocks = 1;
    std::uint64_t seed = 0;

    void validate() const;
    /// Problem the distribution is meant to be tuned with.
    ProblemKind problem_kind() const noexcept;
    std::vector<std::size_t> resolved_blocks() const;
};

struct SampledInstance {
    ProblemInstance x;
    Eigen::VectorXd theta_true;
};

/// Instance `index` of the stream; a pure function of (spec, index).
SampledInstance sample_instance(const DistributionSpec& spec, std::uint64_t index);
std::vector<ProblemInstance> gen_instances(const DistributionSpec& spec, std::size_t N);

enum class Spacing { Linear, Logarithmic };

/// points^p grid over prod_k [lo_k, hi_k], enumerated with dimension 0 most
/// significant, so flat index order is lexicographic order.
struct AlphaGrid {
    std::vector<double> lo;
    std::vector<double> hi;
    std::size_t points = 1;
    Spacing spacing = Spacing::Logarithmic;

    static AlphaGrid cube(std::size_t p, double lo, double hi, std::size_t points, Spacing s);

    std::size_t p() const noexcept { return lo.size(); }
    std::size_t size() const;
    void validate() const;
    /// i-th of the `points` values along dimension k.
    double value(std::size_t k, std::size_t i) const;
    Eigen::VectorXd point(std::size_t flat) const;
    std::vector<std::size_t> multi_index(std::size_t flat) const;
};

/// Which inner problem and validation objective define the bi-level loss.
struct LossSpec {
    ProblemKind kind = ProblemKind::FusedLasso;
    std::vector<std::size_t> block_dims;  // group lasso only
    ElasticNetConfig elastic;
    FusedLassoConfig fused;
    GroupLassoConfig group;

    /// Hyperparameter dimension for an instance with d features.
    std::size_t alpha_dim(std::size_t d) const;
};

/// Bi-level loss on one instance: solve the inner problem at alpha, then
/// evaluate the validation objective at the minimizer.
double bilevel_loss(const LossSpec& spec, const ProblemInstance& x, const Eigen::VectorXd& alpha);

/// Same loss with per-instance precomputation reused across many alphas.
class InstanceEvaluator {
public:
    InstanceEvaluator(const LossSpec& spec, const ProblemInstance& x);
    double loss(const Eigen::VectorXd& alpha) const;
    Eigen::VectorXd theta(const Eigen::VectorXd& alpha) const;

private:
    const LossSpec* spec_;
    const ProblemInstance* x_;
    std::optional<FusedDualQp> qp_;
};

/// Runs f(0..n-1) on up to `workers` threads (0 means hardware concurrency).
/// The first exception thrown by any task is rethrown after all finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& f);

/// N x G matrix of bilevel losses. Throws InstanceError naming the first
/// failing instance.
Eigen::MatrixXd loss_table(const LossSpec& spec, const std::vector<ProblemInstance>& instances,
                           const AlphaGrid& grid, std::size_t workers = 1);

struct TuneResult {
    std::size_t index = 0;
    Eigen::VectorXd alpha_hat;
    double empirical_loss = 0.0;
    /// Mean loss at every grid point.
    std::vector<double> mean_losses;
};

/// Grid argmin of the mean of the rows of a loss table, smallest index on ties.
TuneResult erm_from_table(const Eigen::MatrixXd& table, const AlphaGrid& grid);
TuneResult erm_tune(const LossSpec& spec, const std::vector<ProblemInstance>& instances,
                    const AlphaGrid& grid, std::size_t workers = 1);

struct GapCurveConfig {
    std::vector<std::size_t> Ns;
    std::size_t trials = 30;
    std::size_t n_mc = 2000;
    /// Losses are clipped to [-H, H] when set.
    std::optional<double> clip_H;
    std::size_t workers = 1;
};

struct GapCurvePoint {
    std::size_t N = 0;
    double mean_gap = 0.0;
    double std_gap = 0.0;
    std::size_t trials = 0;
    std::size_t failed = 0;
};

struct GapTrial {
    std::size_t N = 0;
    std::size_t trial = 0;
    bool ok = false;
    double gap = 0.0;
    double tuned_loss = 0.0;
    double best_loss = 0.0;
    std::size_t alpha_index = 0;
    Eigen::VectorXd alpha_hat;
    std::string error;
};

struct GapCurveResult {
    std::vector<GapCurvePoint> points;
    std::vector<GapTrial> trials;
    /// Largest |loss| seen on the Monte Carlo pool (before clipping).
    double H_observed = 0.0;
    std::optional<double> H_clip;
    /// Monte Carlo estimate of the expected loss at each grid point, and its
    /// standard error.
    std::vector<double> population_loss;
    std::vector<double> mc_stderr;
    std::size_t best_index = 0;
};

/// Generalization gap of grid ERM as a function of N. The population loss of
/// every grid point is estimated once on n_mc fresh instances shared by all
/// trials; trial t at size N tunes on its own N instances.
GapCurveResult gap_curve(const LossSpec& loss, const DistributionSpec& dist, const AlphaGrid& grid,
                         const GapCurveConfig& cfg);

/// OLS slope of log(mean_gap) against log(N); points with mean_gap <= 0 are skipped.
double loglog_slope(const std::vector<GapCurvePoint>& points);

}  // namespace pdtune
