#include "pdtune/polynomial.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>

#include "pdtune/errors.hpp"

namespace pdtune {

namespace {

void require_same_nvars(const Polynomial& p, const Polynomial& q) {
    if (p.nvars() != q.nvars()) {
        throw DimensionError("polynomial nvars mismatch: " + std::to_string(p.nvars()) + " vs " +
                             std::to_string(q.nvars()));
    }
}

}  // namespace

Polynomial::Polynomial(std::size_t nvars) : nvars_(nvars) {
    if (nvars == 0) throw DimensionError("polynomial needs at least one variable");
}

Polynomial::Polynomial(std::size_t nvars, TermMap terms) : Polynomial(nvars) {
    for (auto& [e, c] : terms) add_term(e, c);
}

Polynomial Polynomial::constant(std::size_t nvars, double c) {
    return monomial(nvars, Exponents(nvars, 0), c);
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t k) {
    if (k >= nvars) throw DimensionError("variable index out of range");
    Exponents e(nvars, 0);
    e[k] = 1;
    return monomial(nvars, std::move(e), 1.0);
}

Polynomial Polynomial::monomial(std::size_t nvars, Exponents exps, double coef) {
    Polynomial p(nvars);
    p.add_term(exps, coef);
    return p;
}

void Polynomial::add_term(const Exponents& e, double c) {
    if (e.size() != nvars_) {
        throw DimensionError("exponent vector has length " + std::to_string(e.size()) +
                             ", expected " + std::to_string(nvars_));
    }
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

unsigned Polynomial::degree() const noexcept {
    unsigned best = 0;
    for (const auto& [e, c] : terms_) {
        best = std::max(best, std::accumulate(e.begin(), e.end(), 0u));
    }
    return best;
}

unsigned Polynomial::degree_in(std::size_t k) const {
    if (k >= nvars_) throw DimensionError("variable index out of range");
    unsigned best = 0;
    for (const auto& [e, c] : terms_) best = std::max(best, e[k]);
    return best;
}

double Polynomial::eval(std::span<const double> z) const {
    if (z.size() != nvars_) {
        throw DimensionError("evaluation point has length " + std::to_string(z.size()) +
                             ", expected " + std::to_string(nvars_));
    }
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (std::size_t k = 0; k < nvars_; ++k) {
            for (unsigned j = 0; j < e[k]; ++j) t *= z[k];
        }
        acc += t;
    }
    return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    require_same_nvars(*this, other);
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    require_same_nvars(*this, other);
    for (const auto& [e, c] : other.terms_) add_term(e, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        if (it->second == 0.0) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_same_nvars(a, b);
    Polynomial out(a.nvars());
    Exponents e(a.nvars());
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::embed(std::size_t new_nvars, std::size_t offset) const {
    if (offset + nvars_ > new_nvars) throw DimensionError("embedding does not fit");
    Polynomial out(new_nvars);
    for (const auto& [e, c] : terms_) {
        Exponents f(new_nvars, 0);
        std::copy(e.begin(), e.end(), f.begin() + static_cast<std::ptrdiff_t>(offset));
        out.add_term(f, c);
    }
    return out;
}

Polynomial poly_add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial poly_mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial pow(const Polynomial& p, unsigned k) {
    Polynomial out = Polynomial::constant(p.nvars(), 1.0);
    for (unsigned i = 0; i < k; ++i) out = out * p;
    return out;
}

Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
    const std::size_t n = m.size();
    if (n == 0) throw DimensionError("determinant of an empty matrix");
    if (n > 20) throw DimensionError("determinant expansion limited to 20x20");
    for (const auto& row : m) {
        if (row.size() != n) throw DimensionError("determinant of a non-square matrix");
    }
    const std::size_t nv = m[0][0].nvars();
    // memo[mask] = det of rows popcount(mask)..n-1 restricted to columns not in mask
    std::unordered_map<std::uint32_t, Polynomial> memo;
    auto rec = [&](auto&& self, std::uint32_t mask) -> Polynomial {
        const auto row = static_cast<std::size_t>(std::popcount(mask));
        if (row == n) return Polynomial::constant(nv, 1.0);
        if (auto it = memo.find(mask); it != memo.end()) return it->second;
        Polynomial acc(nv);
        int sign = 1;
        for (std::size_t c = 0; c < n; ++c) {
            if (mask & (1u << c)) continue;
            if (!m[row][c].is_zero()) {
                Polynomial term = m[row][c] * self(self, mask | (1u << c));
                if (sign > 0) {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            sign = -sign;
        }
        memo.emplace(mask, acc);
        return acc;
    };
    return rec(rec, 0u);
}

RationalFunction::RationalFunction(Polynomial numerator)
    : num_(std::move(numerator)), den_(Polynomial::constant(num_.nvars(), 1.0)) {}

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    require_same_nvars(num_, den_);
    if (den_.is_zero()) throw std::invalid_argument("rational function with zero denominator");
}

unsigned RationalFunction::degree() const noexcept {
    return std::max(num_.degree(), den_.degree());
}

double RationalFunction::eval(std::span<const double> z, double singularity_tol) const {
    const double den = den_.eval(z);
    if (!(std::abs(den) > singularity_tol)) {
        throw SingularityError("rational function evaluated at a pole (|denominator| = " +
                               std::to_string(std::abs(den)) + ")");
    }
    return num_.eval(z) / den;
}

double poly_eval(const Polynomial& p, std::span<const double> z) { return p.eval(z); }

double rational_eval(const RationalFunction& r, std::span<const double> z, double singularity_tol) {
    return r.eval(z, singularity_tol);
}

}  // namespace pdtune
