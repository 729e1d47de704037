#include "pdtune/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "pdtune/errors.hpp"

namespace pdtune {

namespace {

std::string to_string(const SignPattern& s) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << int(s[i]);
    os << ')';
    return os.str();
}

void require_dim(std::span<const double> z, std::size_t n) {
    if (z.size() != n) {
        throw DimensionError("point has dimension " + std::to_string(z.size()) + ", expected " +
                             std::to_string(n));
    }
}

}  // namespace

SignPattern::SignPattern(std::vector<std::int8_t> e) : entries(std::move(e)) {
    for (auto v : entries) {
        if (v < -1 || v > 1) throw std::invalid_argument("sign pattern entries must be -1, 0 or 1");
    }
}

SignPattern::SignPattern(std::initializer_list<int> e) {
    entries.reserve(e.size());
    for (int v : e) {
        if (v < -1 || v > 1) throw std::invalid_argument("sign pattern entries must be -1, 0 or 1");
        entries.push_back(static_cast<std::int8_t>(v));
    }
}

std::int8_t sign_with_band(double value, double zero_tol) {
    if (std::abs(value) <= zero_tol) return 0;
    return value > 0 ? 1 : -1;
}

SignPattern sign_pattern(std::span<const Polynomial> boundaries, std::span<const double> z,
                         double zero_tol) {
    SignPattern s;
    s.entries.reserve(boundaries.size());
    for (const auto& h : boundaries) s.entries.push_back(sign_with_band(h.eval(z), zero_tol));
    return s;
}

SignPattern sign_pattern(std::span<const RationalFunction> boundaries, std::span<const double> z,
                         double zero_tol) {
    SignPattern s;
    s.entries.reserve(boundaries.size());
    for (const auto& h : boundaries) s.entries.push_back(sign_with_band(h.eval(z), zero_tol));
    return s;
}

DomainBox::DomainBox(std::vector<double> lo_, std::vector<double> hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || lo.empty()) throw DimensionError("domain box bounds mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("domain box needs lo <= hi");
    }
}

DomainBox DomainBox::cube(std::size_t n, double lo, double hi) {
    return DomainBox(std::vector<double>(n, lo), std::vector<double>(n, hi));
}

DomainBox DomainBox::product(std::size_t p, double a_lo, double a_hi, std::size_t d, double t_lo,
                             double t_hi) {
    std::vector<double> lo(p, a_lo), hi(p, a_hi);
    lo.insert(lo.end(), d, t_lo);
    hi.insert(hi.end(), d, t_hi);
    return DomainBox(std::move(lo), std::move(hi));
}

bool DomainBox::contains(std::span<const double> z) const {
    if (z.size() != dim()) return false;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] < lo[i] || z[i] > hi[i]) return false;
    }
    return true;
}

std::vector<double> DomainBox::sample(std::mt19937_64& rng) const {
    std::vector<double> z(dim());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    }
    return z;
}

PiecewisePolyFn::PiecewisePolyFn(std::vector<Polynomial> boundaries,
                                 std::map<SignPattern, Polynomial> pieces, DomainBox box,
                                 PiecewiseOptions opts)
    : nvars_(box.dim()),
      boundaries_(std::move(boundaries)),
      pieces_(std::move(pieces)),
      box_(std::move(box)),
      zero_tol_(opts.zero_tol) {
    if (pieces_.empty()) throw std::invalid_argument("piecewise function needs at least one piece");
    if (!(zero_tol_ >= 0.0)) throw std::invalid_argument("zero_tol must be non-negative");
    for (const auto& h : boundaries_) {
        if (h.nvars() != nvars_) throw DimensionError("boundary nvars differs from the domain");
    }
    for (const auto& [sigma, f] : pieces_) {
        if (sigma.size() != boundaries_.size()) {
            throw DimensionError("piece pattern " + to_string(sigma) + " has the wrong length");
        }
        if (f.nvars() != nvars_) throw DimensionError("piece nvars differs from the domain");
    }
    if (opts.coverage_samples > 0) check_coverage(opts.coverage_samples, opts.coverage_seed);
}

SignPattern PiecewisePolyFn::pattern_at(std::span<const double> z) const {
    require_dim(z, nvars_);
    return sign_pattern(std::span<const Polynomial>(boundaries_), z, zero_tol_);
}

double PiecewisePolyFn::eval(std::span<const double> z) const {
    const SignPattern sigma = pattern_at(z);
    const auto it = pieces_.find(sigma);
    if (it == pieces_.end()) {
        throw UnreachablePatternError("no piece for sign pattern " + to_string(sigma));
    }
    return it->second.eval(z);
}

Complexity PiecewisePolyFn::complexity() const {
    Complexity c{boundaries_.size(), pieces_.size(), 0};
    for (const auto& h : boundaries_) c.Delta = std::max(c.Delta, h.degree());
    for (const auto& [sigma, f] : pieces_) c.Delta = std::max(c.Delta, f.degree());
    return c;
}

void PiecewisePolyFn::check_coverage(std::size_t samples, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto z = box_.sample(rng);
        const SignPattern sigma = pattern_at(z);
        if (!pieces_.contains(sigma)) {
            throw UnreachablePatternError("sign pattern " + to_string(sigma) +
                                          " is reachable in the domain but has no piece");
        }
    }
}

double pw_eval(const PiecewisePolyFn& f, std::span<const double> z) { return f.eval(z); }
Complexity pw_complexity(const PiecewisePolyFn& f) { return f.complexity(); }

PiecewiseRationalPath::PiecewiseRationalPath(std::vector<RationalFunction> boundaries,
                                             std::vector<PathRegion> regions, std::size_t d,
                                             DomainBox box, double zero_tol)
    : p_(box.dim()),
      d_(d),
      boundaries_(std::move(boundaries)),
      regions_(std::move(regions)),
      box_(std::move(box)),
      zero_tol_(zero_tol) {
    if (regions_.empty()) throw std::invalid_argument("solution path needs at least one region");
    for (const auto& h : boundaries_) {
        if (h.nvars() != p_) throw DimensionError("path boundary is not a function of alpha");
    }
    for (auto& r : regions_) {
        if (r.support.empty()) {
            r.support.resize(boundaries_.size());
            for (std::size_t i = 0; i < r.support.size(); ++i) r.support[i] = i;
        }
        if (r.pattern.size() != r.support.size()) {
            throw DimensionError("region pattern length differs from its support");
        }
        for (auto j : r.support) {
            if (j >= boundaries_.size()) throw DimensionError("region support index out of range");
        }
        if (r.value.size() != d_) throw DimensionError("region value must have d coordinates");
        for (const auto& v : r.value) {
            if (v.nvars() != p_) throw DimensionError("region value is not a function of alpha");
        }
    }
}

PiecewiseRationalPath::PiecewiseRationalPath(
    std::vector<RationalFunction> boundaries,
    const std::map<SignPattern, std::vector<RationalFunction>>& pieces, std::size_t d, DomainBox box,
    double zero_tol)
    : PiecewiseRationalPath(
          std::move(boundaries),
          [&] {
              std::vector<PathRegion> regions;
              for (const auto& [sigma, value] : pieces) regions.push_back({sigma, {}, value});
              return regions;
          }(),
          d, std::move(box), zero_tol) {}

std::size_t PiecewiseRationalPath::select(std::span<const double> alpha) const {
    require_dim(alpha, p_);
    if (!box_.contains(alpha)) throw std::out_of_range("alpha lies outside the path's domain box");
    std::vector<std::optional<std::int8_t>> cache(boundaries_.size());
    auto sign_of = [&](std::size_t j) {
        if (!cache[j]) cache[j] = sign_with_band(boundaries_[j].eval(alpha), zero_tol_);
        return *cache[j];
    };
    std::optional<std::size_t> found;
    for (std::size_t r = 0; r < regions_.size(); ++r) {
        const auto& reg = regions_[r];
        bool match = true;
        for (std::size_t k = 0; k < reg.support.size() && match; ++k) {
            match = sign_of(reg.support[k]) == reg.pattern[k];
        }
        if (!match) continue;
        if (found) throw UnreachablePatternError("alpha matches more than one path region");
        found = r;
    }
    if (!found) throw UnreachablePatternError("alpha matches no path region");
    return *found;
}

std::vector<double> PiecewiseRationalPath::eval(std::span<const double> alpha) const {
    const auto& reg = regions_[select(alpha)];
    std::vector<double> theta(d_);
    for (std::size_t i = 0; i < d_; ++i) theta[i] = reg.value[i].eval(alpha);
    return theta;
}

Complexity PiecewiseRationalPath::complexity() const {
    Complexity c{boundaries_.size(), regions_.size(), 0};
    for (const auto& h : boundaries_) c.Delta = std::max(c.Delta, h.degree());
    for (const auto& r : regions_) {
        for (const auto& v : r.value) c.Delta = std::max(c.Delta, v.degree());
    }
    return c;
}

std::vector<double> path_eval(const PiecewiseRationalPath& path, std::span<const double> alpha) {
    return path.eval(alpha);
}

SemiAlgebraicLift lift_group_lasso(std::size_t p, const std::vector<std::size_t>& block_dims) {
    if (block_dims.empty()) throw std::invalid_argument("group lasso needs at least one block");
    if (p != block_dims.size()) throw DimensionError("p must equal the number of blocks");
    for (auto b : block_dims) {
        if (b < 1) throw std::invalid_argument("every block needs dimension >= 1");
    }
    SemiAlgebraicLift lift;
    lift.p = p;
    lift.block_dims = block_dims;
    lift.d = 0;
    for (auto b : block_dims) lift.d += b;
    lift.n_aux = p;
    const std::size_t n = lift.nvars();
    const std::size_t theta0 = p;
    const std::size_t nu0 = p + lift.d;

    lift.base_poly = Polynomial(n);
    for (std::size_t i = 0; i < p; ++i) {
        lift.base_poly += Polynomial::variable(n, i) * Polynomial::variable(n, nu0 + i);
    }
    std::size_t offset = theta0;
    for (std::size_t i = 0; i < p; ++i) {
        const auto nu = Polynomial::variable(n, nu0 + i);
        Polynomial eq = nu * nu;
        for (std::size_t j = 0; j < block_dims[i]; ++j) {
            const auto t = Polynomial::variable(n, offset + j);
            eq -= t * t;
        }
        offset += block_dims[i];
        lift.constraints.push_back({std::move(eq), Relation::Equal});
        lift.constraints.push_back({nu, Relation::GreaterEqual});
    }
    return lift;
}

SemiAlgebraicLift SemiAlgebraicLift::bind(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) const {
    if (static_cast<std::size_t>(A.cols()) != d || A.rows() != b.size()) {
        throw DimensionError("bind: A must be m x d and b of length m");
    }
    SemiAlgebraicLift out = *this;
    const std::size_t n = nvars();
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        Polynomial resid = Polynomial::constant(n, -b(r));
        for (std::size_t j = 0; j < d; ++j) {
            resid += Polynomial::variable(n, p + j) * A(r, static_cast<Eigen::Index>(j));
        }
        out.base_poly += resid * resid;
    }
    return out;
}

FolComplexity SemiAlgebraicLift::fol_complexity() const {
    unsigned delta = std::max(base_poly.degree(), 2u);
    for (const auto& c : constraints) delta = std::max(delta, c.poly.degree());
    return FolComplexity{
        .M = 2 * (1 + constraints.size()),
        .Delta = delta,
        .p = p,
        .dims = {d, d + 2 * n_aux},
    };
}

}  // namespace pdtune
