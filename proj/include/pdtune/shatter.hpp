#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "pdtune/harness.hpp"

namespace pdtune {

/// L(i, j) = loss of grid point j on instance i.
struct LossMatrix {
    Eigen::MatrixXd values;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
    /// Throws std::invalid_argument on non-finite entries.
    void validate() const;
};

/// Bilevel losses of every (instance, grid point); solver failures surface as
/// InstanceError.
LossMatrix loss_matrix(const LossSpec& spec, const std::vector<ProblemInstance>& instances,
                       const AlphaGrid& grid, std::size_t workers = 1);

using BitPattern = std::vector<std::uint8_t>;

/// { (1[L(i, j) >= t_i])_{i in subset} : j = 0..G-1 }.
std::set<BitPattern> achieved_patterns(const LossMatrix& L, const std::vector<std::size_t>& subset,
                                       const std::vector<double>& thresholds);

struct ShatterWitness {
    std::vector<std::size_t> subset;
    std::vector<double> thresholds;
    /// columns[k] is the smallest grid index whose pattern, read as bits with
    /// subset[0] most significant, equals k.
    std::vector<std::size_t> columns;
};

struct ShatterResult {
    std::size_t size = 0;
    std::optional<ShatterWitness> witness;
    std::size_t nodes_visited = 0;
};

inline constexpr std::size_t kDefaultMaxShatter = 12;
inline constexpr std::size_t kDefaultShatterBudget = 50'000'000;

/// Largest n <= max_N such that some n rows are shattered by thresholds at
/// midpoints between consecutive distinct row values. Exact for the
/// grid-restricted class. Throws BudgetExceededError past `node_budget`
/// search nodes.
ShatterResult max_shattered(const LossMatrix& L, std::size_t max_N = kDefaultMaxShatter,
                            std::size_t node_budget = kDefaultShatterBudget);

/// Recomputes the witness patterns directly; true iff all 2^n appear.
bool verify_witness(const LossMatrix& L, const ShatterWitness& w);

}  // namespace pdtune
