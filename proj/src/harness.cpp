#include "pdtune/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "pdtune/errors.hpp"

namespace pdtune {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::string to_string(DistributionKind k) {
    switch (k) {
        case DistributionKind::GaussianDense: return "gaussian-dense";
        case DistributionKind::PiecewiseConstant: return "piecewise-constant";
        case DistributionKind::GroupSparse: return "group-sparse";
    }
    return "unknown";
}

DistributionKind distribution_kind_from_string(const std::string& s) {
    if (s == "gaussian-dense") return DistributionKind::GaussianDense;
    if (s == "piecewise-constant" || s == "fused") return DistributionKind::PiecewiseConstant;
    if (s == "group-sparse" || s == "group") return DistributionKind::GroupSparse;
    throw std::invalid_argument("unknown distribution kind '" + s + "'");
}

std::vector<std::size_t> DistributionSpec::resolved_blocks() const {
    if (!block_dims.empty()) return block_dims;
    std::vector<std::size_t> out;
    for (std::size_t left = d; left > 0;) {
        const std::size_t take = std::min<std::size_t>(3, left);
        out.push_back(take);
        left -= take;
    }
    return out;
}

ProblemKind DistributionSpec::problem_kind() const noexcept {
    switch (kind) {
        case DistributionKind::GaussianDense: return ProblemKind::ElasticNet;
        case DistributionKind::PiecewiseConstant: return ProblemKind::FusedLasso;
        case DistributionKind::GroupSparse: return ProblemKind::GroupLasso;
    }
    return ProblemKind::FusedLasso;
}

void DistributionSpec::validate() const {
    if (m < 1 || m_val < 1 || d < 1) throw std::invalid_argument("m, m_val and d must be >= 1");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw std::invalid_argument("noise_std must be >= 0");
    if (!std::isfinite(signal_scale)) throw std::invalid_argument("signal_scale must be finite");
    switch (kind) {
        case DistributionKind::GaussianDense:
            if (n_active > d) throw std::invalid_argument("n_active exceeds d");
            break;
        case DistributionKind::PiecewiseConstant:
            if (m < d) throw std::invalid_argument("fused instances need m >= d for full column rank");
            if (n_changepoints + 1 > d) throw std::invalid_argument("n_changepoints must be < d");
            break;
        case DistributionKind::GroupSparse: {
            const auto blocks = resolved_blocks();
            const auto total = std::accumulate(blocks.begin(), blocks.end(), std::size_t{0});
            if (total != d) throw std::invalid_argument("block_dims must sum to d");
            for (auto b : blocks) {
                if (b == 0) throw std::invalid_argument("block_dims entries must be >= 1");
            }
            if (active_blocks > blocks.size()) throw std::invalid_argument("active_blocks exceeds block count");
            break;
        }
    }
}

SampledInstance sample_instance(const DistributionSpec& spec, std::uint64_t index) {
    spec.validate();
    std::mt19937_64 rng(derive_seed(spec.seed, index));
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(spec.d);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    switch (spec.kind) {
        case DistributionKind::GaussianDense: {
            const std::size_t k = spec.n_active == 0 ? std::max<std::size_t>(1, spec.d / 2) : spec.n_active;
            std::vector<Eigen::Index> idx(spec.d);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t i = 0; i < k; ++i) theta(idx[i]) = spec.signal_scale * normal(rng);
            break;
        }
        case DistributionKind::PiecewiseConstant: {
            std::vector<std::size_t> cuts(spec.d - 1);
            std::iota(cuts.begin(), cuts.end(), std::size_t{1});
            std::shuffle(cuts.begin(), cuts.end(), rng);
            cuts.resize(spec.n_changepoints);
            std::sort(cuts.begin(), cuts.end());
            double level = spec.signal_scale * normal(rng);
            std::size_t next = 0;
            for (std::size_t j = 0; j < spec.d; ++j) {
                if (next < cuts.size() && cuts[next] == j) {
                    level = spec.signal_scale * normal(rng);
                    ++next;
                }
                theta(static_cast<Eigen::Index>(j)) = level;
            }
            break;
        }
        case DistributionKind::GroupSparse: {
            const auto blocks = spec.resolved_blocks();
            std::vector<std::size_t> order(blocks.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::shuffle(order.begin(), order.end(), rng);
            std::vector<bool> active(blocks.size(), false);
            for (std::size_t i = 0; i < spec.active_blocks; ++i) active[order[i]] = true;
            Eigen::Index at = 0;
            for (std::size_t g = 0; g < blocks.size(); ++g) {
                for (std::size_t j = 0; j < blocks[g]; ++j, ++at) {
                    if (active[g]) theta(at) = spec.signal_scale * normal(rng);
                }
            }
            break;
        }
    }

    auto draw = [&](std::size_t rows, Eigen::MatrixXd& A, Eigen::VectorXd& b) {
        A.resize(static_cast<Eigen::Index>(rows), d);
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            for (Eigen::Index j = 0; j < d; ++j) A(i, j) = normal(rng);
        }
        b = A * theta;
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) += spec.noise_std * normal(rng);
    };
    SampledInstance s;
    draw(spec.m, s.x.A, s.x.b);
    draw(spec.m_val, s.x.A_val, s.x.b_val);
    s.theta_true = std::move(theta);
    return s;
}

std::vector<ProblemInstance> gen_instances(const DistributionSpec& spec, std::size_t N) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    std::vector<ProblemInstance> out;
    out.reserve(N);
    for (std::size_t i = 0; i < N; ++i) out.push_back(sample_instance(spec, i).x);
    return out;
}

// ---------------------------------------------------------------- grid

AlphaGrid AlphaGrid::cube(std::size_t p, double lo, double hi, std::size_t points, Spacing s) {
    AlphaGrid g;
    g.lo.assign(p, lo);
    g.hi.assign(p, hi);
    g.points = points;
    g.spacing = s;
    g.validate();
    return g;
}

void AlphaGrid::validate() const {
    if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("grid bounds need matching non-empty lo/hi");
    if (points < 1) throw std::invalid_argument("grid needs at least one point per dimension");
    for (std::size_t k = 0; k < lo.size(); ++k) {
        if (!(lo[k] <= hi[k])) throw std::invalid_argument("grid lo must be <= hi");
        if (spacing == Spacing::Logarithmic && !(lo[k] > 0.0)) {
            throw std::invalid_argument("logarithmic grid needs lo > 0");
        }
    }
    double log_size = static_cast<double>(lo.size()) * std::log2(static_cast<double>(points));
    if (log_size > 40) throw std::invalid_argument("grid has more than 2^40 points");
}

std::size_t AlphaGrid::size() const {
    std::size_t n = 1;
    for (std::size_t k = 0; k < lo.size(); ++k) n *= points;
    return n;
}

double AlphaGrid::value(std::size_t k, std::size_t i) const {
    if (points == 1) return lo[k];
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    if (i + 1 == points) return hi[k];
    if (spacing == Spacing::Linear) return lo[k] + t * (hi[k] - lo[k]);
    return std::exp(std::log(lo[k]) + t * (std::log(hi[k]) - std::log(lo[k])));
}

std::vector<std::size_t> AlphaGrid::multi_index(std::size_t flat) const {
    if (flat >= size()) throw std::out_of_range("grid index out of range");
    std::vector<std::size_t> idx(p());
    for (std::size_t k = p(); k-- > 0;) {
        idx[k] = flat % points;
        flat /= points;
    }
    return idx;
}

Eigen::VectorXd AlphaGrid::point(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Eigen::VectorXd a(static_cast<Eigen::Index>(p()));
    for (std::size_t k = 0; k < p(); ++k) a(static_cast<Eigen::Index>(k)) = value(k, idx[k]);
    return a;
}

// ---------------------------------------------------------------- losses

std::size_t LossSpec::alpha_dim(std::size_t d) const {
    switch (kind) {
        case ProblemKind::ElasticNet: return 2;
        case ProblemKind::FusedLasso: return d - 1;
        case ProblemKind::GroupLasso: return block_dims.size();
    }
    return 0;
}

InstanceEvaluator::InstanceEvaluator(const LossSpec& spec, const ProblemInstance& x) : spec_(&spec), x_(&x) {
    x.validate();
    if (spec.kind == ProblemKind::FusedLasso) qp_ = fused_lasso_dual_qp(x, spec.fused);
    if (spec.kind == ProblemKind::GroupLasso && spec.block_dims.empty()) {
        throw std::invalid_argument("group lasso loss needs block_dims");
    }
}

Eigen::VectorXd InstanceEvaluator::theta(const Eigen::VectorXd& alpha) const {
    const auto need = static_cast<Eigen::Index>(spec_->alpha_dim(static_cast<std::size_t>(x_->d())));
    if (alpha.size() != need) {
        throw DimensionError("alpha has " + std::to_string(alpha.size()) + " entries, expected " +
                             std::to_string(need));
    }
    switch (spec_->kind) {
        case ProblemKind::ElasticNet:
            return elastic_net_solve(*x_, alpha(0), alpha(1), spec_->elastic).theta;
        case ProblemKind::FusedLasso: {
            const auto sol = fused_lasso_dual_solve(*qp_, *x_, alpha, spec_->fused);
            return fused_lasso_primal_recover(*qp_, sol.u);
        }
        case ProblemKind::GroupLasso:
            return group_lasso_solve(*x_, alpha, spec_->block_dims, spec_->group).theta;
    }
    throw std::logic_error("unknown problem kind");
}

double InstanceEvaluator::loss(const Eigen::VectorXd& alpha) const {
    return validation_loss(*x_, theta(alpha), spec_->kind);
}

double bilevel_loss(const LossSpec& spec, const ProblemInstance& x, const Eigen::VectorXd& alpha) {
    return InstanceEvaluator(spec, x).loss(alpha);
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& f) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

namespace {

// Row i of the table, or the failure message.
struct RowResult {
    bool ok = true;
    std::string error;
};

}  // namespace

Eigen::MatrixXd loss_table(const LossSpec& spec, const std::vector<ProblemInstance>& instances,
                           const AlphaGrid& grid, std::size_t workers) {
    if (instances.empty()) throw std::invalid_argument("no instances");
    grid.validate();
    const std::size_t G = grid.size();
    std::vector<Eigen::VectorXd> alphas;
    alphas.reserve(G);
    for (std::size_t j = 0; j < G; ++j) alphas.push_back(grid.point(j));

    Eigen::MatrixXd table(static_cast<Eigen::Index>(instances.size()), static_cast<Eigen::Index>(G));
    std::vector<RowResult> rows(instances.size());
    parallel_for(instances.size(), workers, [&](std::size_t i) {
        try {
            const InstanceEvaluator ev(spec, instances[i]);
            for (std::size_t j = 0; j < G; ++j) {
                table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ev.loss(alphas[j]);
            }
        } catch (const std::exception& e) {
            rows[i] = {false, e.what()};
        }
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].ok) throw InstanceError(i, rows[i].error);
    }
    return table;
}

TuneResult erm_from_table(const Eigen::MatrixXd& table, const AlphaGrid& grid) {
    if (table.rows() < 1 || table.cols() < 1) throw std::invalid_argument("empty loss table");
    if (static_cast<std::size_t>(table.cols()) != grid.size()) {
        throw DimensionError("loss table columns differ from grid size");
    }
    TuneResult r;
    r.mean_losses.resize(static_cast<std::size_t>(table.cols()));
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
        r.mean_losses[static_cast<std::size_t>(j)] = table.col(j).mean();
    }
    // strict < keeps the smallest index on ties
    r.index = 0;
    for (std::size_t j = 1; j < r.mean_losses.size(); ++j) {
        if (r.mean_losses[j] < r.mean_losses[r.index]) r.index = j;
    }
    r.empirical_loss = r.mean_losses[r.index];
    r.alpha_hat = grid.point(r.index);
    return r;
}

TuneResult erm_tune(const LossSpec& spec, const std::vector<ProblemInstance>& instances,
                    const AlphaGrid& grid, std::size_t workers) {
    return erm_from_table(loss_table(spec, instances, grid, workers), grid);
}

// ---------------------------------------------------------------- gap curve

namespace {

void clip_table(Eigen::MatrixXd& t, const std::optional<double>& H) {
    if (H) t = t.cwiseMax(-*H).cwiseMin(*H);
}

constexpr std::uint64_t kPoolStream = 0;
constexpr std::uint64_t kTrainStreamBase = 1ULL << 32;

}  // namespace

GapCurveResult gap_curve(const LossSpec& loss, const DistributionSpec& dist, const AlphaGrid& grid,
                         const GapCurveConfig& cfg) {
    dist.validate();
    grid.validate();
    if (cfg.n_mc < 100) throw std::invalid_argument("n_mc must be >= 100");
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (cfg.clip_H && !(*cfg.clip_H > 0.0)) throw std::invalid_argument("clip_H must be > 0");
    for (auto N : cfg.Ns) {
        if (N < 1) throw std::invalid_argument("every N must be >= 1");
    }
    if (loss.alpha_dim(dist.d) != grid.p()) {
        throw DimensionError("grid dimension " + std::to_string(grid.p()) + " does not match the loss (" +
                             std::to_string(loss.alpha_dim(dist.d)) + ")");
    }

    GapCurveResult res;
    res.H_clip = cfg.clip_H;

    DistributionSpec pool_spec = dist;
    pool_spec.seed = derive_seed(dist.seed, kPoolStream);
    const auto pool = gen_instances(pool_spec, cfg.n_mc);
    Eigen::MatrixXd pool_table = loss_table(loss, pool, grid, cfg.workers);
    res.H_observed = pool_table.cwiseAbs().maxCoeff();
    clip_table(pool_table, cfg.clip_H);

    const auto G = static_cast<std::size_t>(pool_table.cols());
    const double n = static_cast<double>(pool_table.rows());
    res.population_loss.resize(G);
    res.mc_stderr.resize(G);
    for (std::size_t j = 0; j < G; ++j) {
        const auto col = pool_table.col(static_cast<Eigen::Index>(j));
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / std::max(1.0, n - 1.0);
        res.population_loss[j] = mean;
        res.mc_stderr[j] = std::sqrt(var / n);
    }
    res.best_index = static_cast<std::size_t>(
        std::min_element(res.population_loss.begin(), res.population_loss.end()) - res.population_loss.begin());
    const double best = res.population_loss[res.best_index];

    res.trials.resize(cfg.Ns.size() * cfg.trials);
    parallel_for(res.trials.size(), cfg.workers, [&](std::size_t k) {
        const std::size_t a = k / cfg.trials;
        const std::size_t t = k % cfg.trials;
        GapTrial& tr = res.trials[k];
        tr.N = cfg.Ns[a];
        tr.trial = t;
        tr.best_loss = best;
        try {
            DistributionSpec train = dist;
            train.seed = derive_seed(derive_seed(dist.seed, kTrainStreamBase + tr.N), t);
            Eigen::MatrixXd table = loss_table(loss, gen_instances(train, tr.N), grid, 1);
            clip_table(table, cfg.clip_H);
            const TuneResult tuned = erm_from_table(table, grid);
            tr.alpha_index = tuned.index;
            tr.alpha_hat = tuned.alpha_hat;
            tr.tuned_loss = res.population_loss[tuned.index];
            tr.gap = tr.tuned_loss - best;
            tr.ok = true;
        } catch (const std::exception& e) {
            tr.ok = false;
            tr.error = e.what();
        }
    });

    for (std::size_t a = 0; a < cfg.Ns.size(); ++a) {
        GapCurvePoint pt;
        pt.N = cfg.Ns[a];
        std::vector<double> gaps;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const auto& tr = res.trials[a * cfg.trials + t];
            if (tr.ok) {
                gaps.push_back(tr.gap);
            } else {
                ++pt.failed;
            }
        }
        pt.trials = gaps.size();
        if (!gaps.empty()) {
            pt.mean_gap = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
            if (gaps.size() > 1) {
                double ss = 0.0;
                for (double g : gaps) ss += (g - pt.mean_gap) * (g - pt.mean_gap);
                pt.std_gap = std::sqrt(ss / static_cast<double>(gaps.size() - 1));
            }
        }
        res.points.push_back(pt);
    }
    return res;
}

double loglog_slope(const std::vector<GapCurvePoint>& points) {
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (p.mean_gap > 0.0 && p.N > 0) {
            xs.push_back(std::log(static_cast<double>(p.N)));
            ys.push_back(std::log(p.mean_gap));
        }
    }
    if (xs.size() < 2) throw std::invalid_argument("slope needs at least two points with positive gap");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace pdtune
