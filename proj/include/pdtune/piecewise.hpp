#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pdtune/bounds.hpp"
#include "pdtune/polynomial.hpp"

namespace pdtune {

inline constexpr double kDefaultZeroTol = 1e-10;

/// Vector of signs in {-1, 0, +1}, one per boundary function.
struct SignPattern {
    std::vector<std::int8_t> entries;

    SignPattern() = default;
    explicit SignPattern(std::vector<std::int8_t> e);
    SignPattern(std::initializer_list<int> e);

    std::size_t size() const noexcept { return entries.size(); }
    std::int8_t operator[](std::size_t i) const { return entries[i]; }

    friend auto operator<=>(const SignPattern&, const SignPattern&) = default;
    friend bool operator==(const SignPattern&, const SignPattern&) = default;
};

/// sign(value) with a symmetric zero band.
std::int8_t sign_with_band(double value, double zero_tol);

SignPattern sign_pattern(std::span<const Polynomial> boundaries, std::span<const double> z,
                         double zero_tol = kDefaultZeroTol);
SignPattern sign_pattern(std::span<const RationalFunction> boundaries, std::span<const double> z,
                         double zero_tol = kDefaultZeroTol);

/// Axis-aligned box, the domain every structure is declared on.
struct DomainBox {
    std::vector<double> lo;
    std::vector<double> hi;

    DomainBox() = default;
    DomainBox(std::vector<double> lo, std::vector<double> hi);
    /// [lo, hi]^n.
    static DomainBox cube(std::size_t n, double lo, double hi);
    /// [a_lo, a_hi]^p x [t_lo, t_hi]^d, hyperparameters first.
    static DomainBox product(std::size_t p, double a_lo, double a_hi, std::size_t d, double t_lo,
                             double t_hi);

    std::size_t dim() const noexcept { return lo.size(); }
    bool contains(std::span<const double> z) const;
    std::vector<double> sample(std::mt19937_64& rng) const;
};

/// (M, T, Delta): boundary count, piece count, max degree.
struct Complexity {
    std::size_t M = 0;
    std::size_t T = 0;
    unsigned Delta = 0;
    friend bool operator==(const Complexity&, const Complexity&) = default;
};

struct PiecewiseOptions {
    double zero_tol = kDefaultZeroTol;
    /// Rejection-sampling budget for the reachable-pattern check; 0 disables it.
    std::size_t coverage_samples = 10000;
    std::uint64_t coverage_seed = 0x5eed'c0ffee;
};

/// A function that is a polynomial on every sign-pattern cell of a set of
/// boundary polynomials.
class PiecewisePolyFn {
public:
    PiecewisePolyFn(std::vector<Polynomial> boundaries, std::map<SignPattern, Polynomial> pieces,
                    DomainBox box, PiecewiseOptions opts = {});

    std::size_t nvars() const noexcept { return nvars_; }
    const std::vector<Polynomial>& boundaries() const noexcept { return boundaries_; }
    const std::map<SignPattern, Polynomial>& pieces() const noexcept { return pieces_; }
    const DomainBox& box() const noexcept { return box_; }
    double zero_tol() const noexcept { return zero_tol_; }

    SignPattern pattern_at(std::span<const double> z) const;
    double eval(std::span<const double> z) const;
    Complexity complexity() const;

    /// Samples the domain box and throws UnreachablePatternError on the first
    /// sampled sign pattern that has no piece.
    void check_coverage(std::size_t samples, std::uint64_t seed) const;

private:
    std::size_t nvars_;
    std::vector<Polynomial> boundaries_;
    std::map<SignPattern, Polynomial> pieces_;
    DomainBox box_;
    double zero_tol_;
};

double pw_eval(const PiecewisePolyFn& f, std::span<const double> z);
Complexity pw_complexity(const PiecewisePolyFn& f);

/// One region of a piecewise rational solution path. The region is the set of
/// alpha whose signs on `support` (indices into the path's boundary list)
/// equal `pattern`; an empty support means the full boundary list.
struct PathRegion {
    SignPattern pattern;
    std::vector<std::size_t> support;
    std::vector<RationalFunction> value;
};

/// alpha -> theta*(alpha), rational on every region.
class PiecewiseRationalPath {
public:
    PiecewiseRationalPath(std::vector<RationalFunction> boundaries, std::vector<PathRegion> regions,
                          std::size_t d, DomainBox box, double zero_tol = kDefaultZeroTol);
    /// Regions keyed by the full sign vector over all boundaries.
    PiecewiseRationalPath(std::vector<RationalFunction> boundaries,
                          const std::map<SignPattern, std::vector<RationalFunction>>& pieces,
                          std::size_t d, DomainBox box, double zero_tol = kDefaultZeroTol);

    std::size_t p() const noexcept { return p_; }
    std::size_t d() const noexcept { return d_; }
    const std::vector<RationalFunction>& boundaries() const noexcept { return boundaries_; }
    const std::vector<PathRegion>& regions() const noexcept { return regions_; }
    const DomainBox& box() const noexcept { return box_; }
    double zero_tol() const noexcept { return zero_tol_; }

    /// Index of the unique region containing alpha.
    std::size_t select(std::span<const double> alpha) const;
    std::vector<double> eval(std::span<const double> alpha) const;
    /// (M_path, T_path, Delta_path).
    Complexity complexity() const;

private:
    std::size_t p_;
    std::size_t d_;
    std::vector<RationalFunction> boundaries_;
    std::vector<PathRegion> regions_;
    DomainBox box_;
    double zero_tol_;
};

std::vector<double> path_eval(const PiecewiseRationalPath& path, std::span<const double> alpha);

enum class Relation { Equal, GreaterEqual };

struct LiftConstraint {
    Polynomial poly;
    Relation relation;
};

/// Polynomial description of the weighted group-lasso objective obtained by
/// adding one auxiliary variable per block (nu_i = ||theta_i||_2).
/// Variable order: alpha (p), theta (d), nu (p).
struct SemiAlgebraicLift {
    std::size_t p = 0;
    std::size_t d = 0;
    std::vector<std::size_t> block_dims;
    std::size_t n_aux = 0;
    /// sum_i alpha_i nu_i until bind() adds the data term ||A theta - b||^2.
    Polynomial base_poly{1};
    std::vector<LiftConstraint> constraints;

    std::size_t nvars() const noexcept { return p + d + n_aux; }
    SemiAlgebraicLift bind(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) const;
    /// Predicate bookkeeping of the tuning formula built on this lift:
    /// objective comparison and validation check, plus the constraint set
    /// instantiated for both the candidate and the competitor.
    FolComplexity fol_complexity() const;
};

SemiAlgebraicLift lift_group_lasso(std::size_t p, const std::vector<std::size_t>& block_dims);

}  // namespace pdtune
