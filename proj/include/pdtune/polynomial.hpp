#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace pdtune {

using Exponents = std::vector<unsigned>;

/// Sparse multivariate polynomial with double coefficients.
///
/// Terms are kept in a map keyed by exponent vector, so iteration order is
/// lexicographic in the exponents. Exact-zero coefficients are never stored.
class Polynomial {
public:
    using TermMap = std::map<Exponents, double>;

    explicit Polynomial(std::size_t nvars);
    Polynomial(std::size_t nvars, TermMap terms);

    static Polynomial constant(std::size_t nvars, double c);
    /// The coordinate polynomial z_k.
    static Polynomial variable(std::size_t nvars, std::size_t k);
    static Polynomial monomial(std::size_t nvars, Exponents exps, double coef);

    std::size_t nvars() const noexcept { return nvars_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// Maximum total degree over stored terms; 0 for the zero polynomial.
    unsigned degree() const noexcept;
    /// Maximum exponent of variable k over stored terms.
    unsigned degree_in(std::size_t k) const;

    double eval(std::span<const double> z) const;

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    Polynomial operator-() const { return *this * -1.0; }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    /// Re-embed into a larger variable space: variable k maps to slot offset + k.
    Polynomial embed(std::size_t new_nvars, std::size_t offset) const;

private:
    void add_term(const Exponents& e, double c);

    std::size_t nvars_;
    TermMap terms_;
};

Polynomial poly_add(const Polynomial& p, const Polynomial& q);
Polynomial poly_mul(const Polynomial& p, const Polynomial& q);
Polynomial pow(const Polynomial& p, unsigned k);

/// Determinant of a square matrix of polynomials (Laplace expansion over
/// column subsets, memoised). Intended for the small systems that appear in
/// solution-path construction.
Polynomial determinant(const std::vector<std::vector<Polynomial>>& m);

inline constexpr double kDefaultSingularityTol = 1e-12;

/// Ratio of two polynomials. No cancellation is ever performed, so the degree
/// is the formal max(deg num, deg den).
class RationalFunction {
public:
    explicit RationalFunction(Polynomial numerator);
    RationalFunction(Polynomial numerator, Polynomial denominator);

    const Polynomial& numerator() const noexcept { return num_; }
    const Polynomial& denominator() const noexcept { return den_; }
    std::size_t nvars() const noexcept { return num_.nvars(); }
    unsigned degree() const noexcept;

    double eval(std::span<const double> z, double singularity_tol = kDefaultSingularityTol) const;

    friend bool operator==(const RationalFunction&, const RationalFunction&) = default;

private:
    Polynomial num_;
    Polynomial den_;
};

double poly_eval(const Polynomial& p, std::span<const double> z);
double rational_eval(const RationalFunction& r, std::span<const double> z,
                     double singularity_tol = kDefaultSingularityTol);

}  // namespace pdtune
