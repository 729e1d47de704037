#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdtune {

/// Non-negative integer count that stays exact while it fits in 64 bits and
/// degrades to a base-2 logarithm past that. Complexity counts such as
/// (d+1) 3^d overflow every machine type long before the bounds built on
/// them stop being meaningful.
class Count {
public:
    Count(std::uint64_t v = 0);  // NOLINT(google-explicit-constructor)
    static Count from_log2(double log2_value);
    /// base^exp, exact when it fits.
    static Count power(std::uint64_t base, std::uint64_t exp);

    bool is_exact() const noexcept { return exact_.has_value(); }
    std::optional<std::uint64_t> exact() const noexcept { return exact_; }
    bool is_zero() const noexcept { return exact_ && *exact_ == 0; }
    /// -inf for zero.
    double log2() const noexcept { return log2_; }
    /// Double value; +inf when it does not fit.
    double approx() const noexcept;

    friend Count operator+(const Count& a, const Count& b);
    friend Count operator*(const Count& a, const Count& b);
    friend bool operator==(const Count& a, const Count& b);

private:
    std::optional<std::uint64_t> exact_;
    double log2_;
};

/// Computed pseudo-dimension bound with everything needed to reproduce it.
struct BoundReport {
    double bound_value = 0.0;
    std::string formula_id;
    std::map<std::string, double> inputs;
    /// Derived integer counts (M_total, M_fol, ...) when representable.
    std::map<std::string, double> derived;
    std::map<std::string, double> log2_intermediates;
    double constant_c = 1.0;
};

/// Shape of a polynomial first-order formula: M atomic predicates of degree at
/// most Delta, p free variables and one dimension per quantifier block.
struct FolComplexity {
    std::uint64_t M = 1;
    std::uint64_t Delta = 1;
    std::size_t p = 1;
    std::vector<std::size_t> dims;

    void validate() const;
    std::size_t K() const noexcept { return dims.size(); }
    /// prod_k (d_k + 1); 1 for an unquantified formula.
    double block_product() const;
};

struct QeComplexity {
    double log2_I = 0.0;
    double log2_Delta_QE = 0.0;
};

inline constexpr double kDefaultConstant = 1.0;

/// Predicate count and degree of the quantifier-free equivalent, in log2.
QeComplexity qe_complexity(const FolComplexity& fc, double c = kDefaultConstant);

/// Pseudo-dimension of a class whose threshold indicators are polynomial
/// formulas of shape `fc`:
///   c (p prod(d_k+1) log2 M + p^2 prod(d_k+1) log2 Delta).
BoundReport pdim_fol(const FolComplexity& fc, double c = kDefaultConstant);

/// The older Goldberg-Jerrum style bound, kept as a comparator:
///   c 2^{cK} p (p+q) prod(d_k) (log2 M + log2 Delta).
BoundReport pdim_goldberg_jerrum_legacy(const FolComplexity& fc, std::uint64_t q,
                                        double c = kDefaultConstant);

/// Tuning against the training objective (loss = min over theta).
BoundReport pdim_training(std::uint64_t p, std::uint64_t d, std::uint64_t M_f, std::uint64_t T_f,
                          std::uint64_t Delta_f, double c = kDefaultConstant);

/// Tuning against a separate validation objective. Records both the
/// statement-level M_tot (used for the bound) and the count derived from the
/// explicit formula construction, which is quadratic in T_f.
BoundReport pdim_validation(std::uint64_t p, std::uint64_t d, std::uint64_t M_f, std::uint64_t T_f,
                            std::uint64_t M_g, std::uint64_t T_g, std::uint64_t Delta_f,
                            std::uint64_t Delta_g, double c = kDefaultConstant);

struct SolutionPathInputs {
    Count M_path;
    Count T_path;
    Count Delta_path;
    Count M_k;
    Count T_k;
    Count Delta_k;
};

/// Bound when theta*(alpha) is an explicit piecewise rational path:
///   M_total = M_path + T_path (M_k + T_k),  Delta_total = Delta_k Delta_path,
///   bound = c p log2(max(M_total Delta_total, 2)).
BoundReport pdim_solution_path(std::uint64_t p, const SolutionPathInputs& in,
                               double c = kDefaultConstant);

/// Structural inputs of the elastic-net path over d features:
/// T_path = 3^d, M_path = d 3^d, Delta_path = 2d, validation loss (0, 1, 2).
SolutionPathInputs elastic_net_path_inputs(std::uint64_t d);

BoundReport pdim_group_lasso(std::uint64_t p, std::uint64_t d, double c = kDefaultConstant);
BoundReport pdim_fused_lasso(std::uint64_t d, double c = kDefaultConstant);
BoundReport pdim_elastic_net(std::uint64_t d, double c = kDefaultConstant);

/// Formula shape of the group-lasso tuning problem: M = 2(1+2p), Delta = 2,
/// blocks (d, d + 2p).
FolComplexity group_lasso_fol(std::uint64_t p, std::uint64_t d);

/// N = ceil(C (H^2 / eps^2) (pdim + ln(1/delta))).
std::uint64_t sample_complexity(double pdim, double H, double eps, double delta, double C);

}  // namespace pdtune
