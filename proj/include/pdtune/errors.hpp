#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdtune {

// Input shapes disagree (vector length vs nvars, column counts, ...).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A rational function was evaluated on (or numerically next to) a pole.
struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

// The sign pattern at an evaluation point has no piece attached to it.
struct UnreachablePatternError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CycleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RankDeficientError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver ran out of iterations. Carries the best iterate seen.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, std::vector<double> best, double residual)
        : std::runtime_error(what), best_iterate(std::move(best)), best_residual(residual) {}
    std::vector<double> best_iterate;
    double best_residual;
};

// A per-instance failure inside a batch operation; names the instance.
struct InstanceError : std::runtime_error {
    InstanceError(std::size_t index, const std::string& cause)
        : std::runtime_error("instance " + std::to_string(index) + ": " + cause), instance(index) {}
    std::size_t instance;
};

}  // namespace pdtune
