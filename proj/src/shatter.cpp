#include "pdtune/shatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pdtune/errors.hpp"

namespace pdtune {

void LossMatrix::validate() const {
    if (!values.allFinite()) throw std::invalid_argument("loss matrix has non-finite entries");
}

LossMatrix loss_matrix(const LossSpec& spec, const std::vector<ProblemInstance>& instances,
                       const AlphaGrid& grid, std::size_t workers) {
    LossMatrix L{loss_table(spec, instances, grid, workers)};
    L.validate();
    return L;
}

std::set<BitPattern> achieved_patterns(const LossMatrix& L, const std::vector<std::size_t>& subset,
                                       const std::vector<double>& thresholds) {
    if (subset.size() != thresholds.size()) throw std::invalid_argument("one threshold per subset row");
    for (auto i : subset) {
        if (i >= L.rows()) throw std::out_of_range("row index " + std::to_string(i) + " out of range");
    }
    std::set<BitPattern> out;
    for (std::size_t j = 0; j < L.cols(); ++j) {
        BitPattern bits(subset.size());
        for (std::size_t k = 0; k < subset.size(); ++k) {
            bits[k] = L.values(static_cast<Eigen::Index>(subset[k]), static_cast<Eigen::Index>(j)) >= thresholds[k];
        }
        out.insert(std::move(bits));
    }
    return out;
}

namespace {

struct RowInfo {
    std::size_t row;
    std::vector<double> midpoints;
};

class Search {
public:
    Search(const LossMatrix& L, std::vector<RowInfo> rows, std::size_t budget)
        : L_(L), rows_(std::move(rows)), budget_(budget) {}

    // Depth-first over (row, threshold) choices in increasing row order;
    // every prefix must already be shattered.
    bool find(std::size_t n) {
        target_ = n;
        chosen_.clear();
        thresholds_.clear();
        std::vector<std::uint32_t> cls(L_.cols(), 0);
        return dfs(0, cls);
    }

    std::size_t nodes() const noexcept { return nodes_; }
    const std::vector<std::size_t>& chosen() const noexcept { return chosen_; }
    const std::vector<double>& thresholds() const noexcept { return thresholds_; }

private:
    void tick() {
        if (++nodes_ > budget_) {
            throw BudgetExceededError("shattering search exceeded " + std::to_string(budget_) +
                                      " nodes; retry with a smaller max_N");
        }
    }

    bool dfs(std::size_t start, const std::vector<std::uint32_t>& cls) {
        const std::size_t depth = chosen_.size();
        if (depth == target_) return true;
        const std::size_t need = target_ - depth;
        const std::size_t n_classes = std::size_t{1} << depth;

        // Each class still has to split into 2^need non-empty parts.
        std::vector<std::size_t> count(n_classes, 0);
        for (auto c : cls) ++count[c];
        for (auto k : count) {
            if (k < (std::size_t{1} << need)) return false;
        }

        std::vector<double> lo_c(n_classes), hi_c(n_classes);
        std::vector<std::uint32_t> next(cls.size());
        for (std::size_t r = start; r + need <= rows_.size(); ++r) {
            tick();
            const auto row = static_cast<Eigen::Index>(rows_[r].row);
            std::fill(lo_c.begin(), lo_c.end(), std::numeric_limits<double>::infinity());
            std::fill(hi_c.begin(), hi_c.end(), -std::numeric_limits<double>::infinity());
            for (std::size_t j = 0; j < cls.size(); ++j) {
                const double v = L_.values(row, static_cast<Eigen::Index>(j));
                lo_c[cls[j]] = std::min(lo_c[cls[j]], v);
                hi_c[cls[j]] = std::max(hi_c[cls[j]], v);
            }
            // t splits every class iff max_c min_c < t <= min_c max_c.
            const double lo = *std::max_element(lo_c.begin(), lo_c.end());
            const double hi = *std::min_element(hi_c.begin(), hi_c.end());
            if (!(lo < hi)) continue;
            const auto& mids = rows_[r].midpoints;
            auto it = std::upper_bound(mids.begin(), mids.end(), lo);
            for (; it != mids.end() && *it <= hi; ++it) {
                tick();
                const double t = *it;
                chosen_.push_back(rows_[r].row);
                thresholds_.push_back(t);
                if (need == 1) return true;
                for (std::size_t j = 0; j < cls.size(); ++j) {
                    next[j] = cls[j] * 2 + (L_.values(row, static_cast<Eigen::Index>(j)) >= t ? 1 : 0);
                }
                if (dfs(r + 1, next)) return true;
                chosen_.pop_back();
                thresholds_.pop_back();
            }
        }
        return false;
    }

    const LossMatrix& L_;
    std::vector<RowInfo> rows_;
    std::size_t budget_;
    std::size_t target_ = 0;
    std::size_t nodes_ = 0;
    std::vector<std::size_t> chosen_;
    std::vector<double> thresholds_;
};

ShatterWitness make_witness(const LossMatrix& L, std::vector<std::size_t> subset, std::vector<double> thresholds) {
    ShatterWitness w;
    const std::size_t n = subset.size();
    w.columns.assign(std::size_t{1} << n, L.cols());
    for (std::size_t j = 0; j < L.cols(); ++j) {
        std::size_t code = 0;
        for (std::size_t k = 0; k < n; ++k) {
            code = code * 2 +
                   (L.values(static_cast<Eigen::Index>(subset[k]), static_cast<Eigen::Index>(j)) >= thresholds[k] ? 1 : 0);
        }
        if (w.columns[code] == L.cols()) w.columns[code] = j;
    }
    w.subset = std::move(subset);
    w.thresholds = std::move(thresholds);
    return w;
}

}  // namespace

ShatterResult max_shattered(const LossMatrix& L, std::size_t max_N, std::size_t node_budget) {
    if (max_N > 20) throw std::invalid_argument("max_N must be <= 20");
    if (L.rows() == 0 || L.cols() == 0) throw std::invalid_argument("empty loss matrix");
    L.validate();

    std::vector<RowInfo> rows;
    for (std::size_t i = 0; i < L.rows(); ++i) {
        std::vector<double> v(L.cols());
        for (std::size_t j = 0; j < L.cols(); ++j) v[j] = L.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        if (v.size() < 2) continue;  // a constant row never takes both values
        RowInfo info{i, {}};
        for (std::size_t k = 0; k + 1 < v.size(); ++k) info.midpoints.push_back(0.5 * (v[k] + v[k + 1]));
        rows.push_back(std::move(info));
    }
    // Rows with the most distinct values first.
    std::stable_sort(rows.begin(), rows.end(), [](const RowInfo& a, const RowInfo& b) {
        return a.midpoints.size() > b.midpoints.size();
    });

    ShatterResult res;
    Search search(L, rows, node_budget);
    std::size_t limit = std::min(max_N, rows.size());
    while (limit > 0 && (std::size_t{1} << limit) > L.cols()) --limit;
    for (std::size_t n = 1; n <= limit; ++n) {
        if (!search.find(n)) break;
        res.size = n;
        res.witness = make_witness(L, search.chosen(), search.thresholds());
    }
    res.nodes_visited = search.nodes();
    return res;
}

bool verify_witness(const LossMatrix& L, const ShatterWitness& w) {
    const auto patterns = achieved_patterns(L, w.subset, w.thresholds);
    if (patterns.size() != (std::size_t{1} << w.subset.size())) return false;
    if (w.columns.size() != patterns.size()) return false;
    for (std::size_t code = 0; code < w.columns.size(); ++code) {
        const std::size_t j = w.columns[code];
        if (j >= L.cols()) return false;
        std::size_t got = 0;
        for (std::size_t k = 0; k < w.subset.size(); ++k) {
            got = got * 2 + (L.values(static_cast<Eigen::Index>(w.subset[k]), static_cast<Eigen::Index>(j)) >= w.thresholds[k] ? 1 : 0);
        }
        if (got != code) return false;
    }
    return true;
}

}  // namespace pdtune
