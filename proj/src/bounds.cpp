#include "pdtune/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pdtune {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log2_or_zero(std::uint64_t v) { return v <= 1 ? 0.0 : std::log2(static_cast<double>(v)); }

void require_positive(std::uint64_t v, const char* name) {
    if (v < 1) throw std::invalid_argument(std::string(name) + " must be >= 1");
}

void require_positive(const Count& v, const char* name) {
    if (v.is_zero()) throw std::invalid_argument(std::string(name) + " must be >= 1");
}

// Records a count as a plain input when it is representable and always keeps
// its log2 so huge counts stay inspectable.
void record_count(BoundReport& r, const std::string& name, const Count& v) {
    if (v.is_exact()) r.inputs[name] = static_cast<double>(*v.exact());
    if (!v.is_zero()) r.log2_intermediates["log2_" + name] = v.log2();
}

}  // namespace

Count::Count(std::uint64_t v)
    : exact_(v), log2_(v == 0 ? -kInf : std::log2(static_cast<double>(v))) {}

Count Count::from_log2(double log2_value) {
    if (!std::isfinite(log2_value) || log2_value < 0.0) {
        throw std::invalid_argument("Count::from_log2 needs a finite, non-negative log2");
    }
    Count c;
    c.exact_.reset();
    c.log2_ = log2_value;
    return c;
}

Count Count::power(std::uint64_t base, std::uint64_t exp) {
    Count out(1);
    std::uint64_t acc = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (__builtin_mul_overflow(acc, base, &acc)) {
            return Count::from_log2(static_cast<double>(exp) * std::log2(static_cast<double>(base)));
        }
    }
    return Count(acc);
}

double Count::approx() const noexcept {
    if (exact_) return static_cast<double>(*exact_);
    return std::exp2(log2_);
}

Count operator+(const Count& a, const Count& b) {
    if (a.exact_ && b.exact_) {
        std::uint64_t s;
        if (!__builtin_add_overflow(*a.exact_, *b.exact_, &s)) return Count(s);
    }
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.log2_, b.log2_);
    const double lo = std::min(a.log2_, b.log2_);
    return Count::from_log2(hi + std::log1p(std::exp2(lo - hi)) / std::log(2.0));
}

Count operator*(const Count& a, const Count& b) {
    if (a.exact_ && b.exact_) {
        std::uint64_t s;
        if (!__builtin_mul_overflow(*a.exact_, *b.exact_, &s)) return Count(s);
    }
    if (a.is_zero() || b.is_zero()) return Count(0);
    return Count::from_log2(a.log2_ + b.log2_);
}

bool operator==(const Count& a, const Count& b) {
    if (a.exact_ || b.exact_) return a.exact_ == b.exact_;
    return a.log2_ == b.log2_;
}

void FolComplexity::validate() const {
    require_positive(M, "M");
    require_positive(Delta, "Delta");
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    for (auto dk : dims) {
        if (dk < 1) throw std::invalid_argument("quantifier block dimensions must be >= 1");
    }
}

double FolComplexity::block_product() const {
    double prod = 1.0;
    for (auto dk : dims) prod *= static_cast<double>(dk) + 1.0;
    return prod;
}

QeComplexity qe_complexity(const FolComplexity& fc, double c) {
    fc.validate();
    const double P = fc.block_product();
    const double p = static_cast<double>(fc.p);
    QeComplexity out;
    out.log2_Delta_QE = c * p * P * log2_or_zero(fc.Delta);
    out.log2_I = P * log2_or_zero(fc.M) + out.log2_Delta_QE;
    return out;
}

BoundReport pdim_fol(const FolComplexity& fc, double c) {
    fc.validate();
    const double P = fc.block_product();
    const double p = static_cast<double>(fc.p);
    const double lm = log2_or_zero(fc.M);
    const double ld = log2_or_zero(fc.Delta);

    BoundReport r;
    r.formula_id = "pdim_fol";
    r.constant_c = c;
    r.bound_value = c * (p * P * lm + p * p * P * ld);
    r.inputs = {{"M", static_cast<double>(fc.M)},
                {"Delta", static_cast<double>(fc.Delta)},
                {"p", p},
                {"K", static_cast<double>(fc.K())}};
    for (std::size_t k = 0; k < fc.dims.size(); ++k) {
        r.inputs["d_" + std::to_string(k + 1)] = static_cast<double>(fc.dims[k]);
    }
    r.derived["block_product"] = P;
    r.log2_intermediates = {{"log2_M", lm}, {"log2_Delta", ld}, {"log2_block_product", std::log2(P)}};
    const auto qe = qe_complexity(fc, c);
    r.log2_intermediates["log2_I"] = qe.log2_I;
    r.log2_intermediates["log2_Delta_QE"] = qe.log2_Delta_QE;
    return r;
}

BoundReport pdim_goldberg_jerrum_legacy(const FolComplexity& fc, std::uint64_t q, double c) {
    fc.validate();
    require_positive(q, "q");
    double prod = 1.0;
    for (auto dk : fc.dims) prod *= static_cast<double>(dk);
    const double p = static_cast<double>(fc.p);
    const double K = static_cast<double>(fc.K());
    const double lm = log2_or_zero(fc.M);
    const double ld = log2_or_zero(fc.Delta);

    BoundReport r;
    r.formula_id = "pdim_goldberg_jerrum_legacy";
    r.constant_c = c;
    r.bound_value = c * std::exp2(c * K) * p * (p + static_cast<double>(q)) * prod * (lm + ld);
    r.inputs = {{"M", static_cast<double>(fc.M)},
                {"Delta", static_cast<double>(fc.Delta)},
                {"p", p},
                {"q", static_cast<double>(q)},
                {"K", K}};
    r.derived["dims_product"] = prod;
    r.log2_intermediates = {{"log2_M", lm}, {"log2_Delta", ld}, {"log2_alternation_factor", c * K}};
    return r;
}

BoundReport pdim_training(std::uint64_t p, std::uint64_t d, std::uint64_t M_f, std::uint64_t T_f,
                          std::uint64_t Delta_f, double c) {
    require_positive(p, "p");
    require_positive(d, "d");
    require_positive(M_f, "M_f");
    require_positive(T_f, "T_f");
    require_positive(Delta_f, "Delta_f");
    const double pd = static_cast<double>(p);
    const double dd = static_cast<double>(d);
    const double lm = std::log2(static_cast<double>(M_f + T_f + d));
    const double ld = log2_or_zero(Delta_f);

    BoundReport r;
    r.formula_id = "pdim_training";
    r.constant_c = c;
    r.bound_value = c * (pd * dd * lm + pd * pd * dd * ld);
    r.inputs = {{"p", pd},
                {"d", dd},
                {"M_f", static_cast<double>(M_f)},
                {"T_f", static_cast<double>(T_f)},
                {"Delta_f", static_cast<double>(Delta_f)}};
    // Atomic predicates of the training formula: boundaries, pieces and the
    // 2d box constraints on theta.
    r.derived["M_fol"] = static_cast<double>(M_f + T_f + 2 * d);
    r.log2_intermediates = {{"log2_M_f_T_f_d", lm}, {"log2_Delta_f", ld}};
    return r;
}

BoundReport pdim_validation(std::uint64_t p, std::uint64_t d, std::uint64_t M_f, std::uint64_t T_f,
                            std::uint64_t M_g, std::uint64_t T_g, std::uint64_t Delta_f,
                            std::uint64_t Delta_g, double c) {
    for (auto [v, n] : {std::pair{p, "p"}, {d, "d"}, {M_f, "M_f"}, {T_f, "T_f"}, {M_g, "M_g"},
                        {T_g, "T_g"}, {Delta_f, "Delta_f"}, {Delta_g, "Delta_g"}}) {
        require_positive(v, n);
    }
    const std::uint64_t M_tot = M_f + T_f + M_g + T_g + d;
    const std::uint64_t Delta_tot = std::max(Delta_f, Delta_g);
    const double pd = static_cast<double>(p);
    const double d2 = static_cast<double>(d) * static_cast<double>(d);
    const double lm = std::log2(static_cast<double>(M_tot));
    const double ld = log2_or_zero(Delta_tot);

    BoundReport r;
    r.formula_id = "pdim_validation";
    r.constant_c = c;
    r.bound_value = c * (pd * d2 * lm + pd * pd * d2 * ld);
    r.inputs = {{"p", pd},
                {"d", static_cast<double>(d)},
                {"M_f", static_cast<double>(M_f)},
                {"T_f", static_cast<double>(T_f)},
                {"M_g", static_cast<double>(M_g)},
                {"T_g", static_cast<double>(T_g)},
                {"Delta_f", static_cast<double>(Delta_f)},
                {"Delta_g", static_cast<double>(Delta_g)}};
    r.derived["M_tot"] = static_cast<double>(M_tot);
    r.derived["Delta_tot"] = static_cast<double>(Delta_tot);
    // Count from the explicit construction: 4d domain predicates, the
    // validation structure and pairwise piece comparisons for optimality.
    const double M_appendix = 4.0 * static_cast<double>(d) + static_cast<double>(M_g + T_g) +
                              2.0 * static_cast<double>(M_f) +
                              static_cast<double>(T_f) * static_cast<double>(T_f);
    r.derived["M_appendix"] = M_appendix;
    r.log2_intermediates = {{"log2_M_tot", lm},
                            {"log2_Delta_tot", ld},
                            {"log2_M_appendix", std::log2(M_appendix)}};
    return r;
}

BoundReport pdim_solution_path(std::uint64_t p, const SolutionPathInputs& in, double c) {
    require_positive(p, "p");
    require_positive(in.T_path, "T_path");
    require_positive(in.T_k, "T_k");
    require_positive(in.Delta_path, "Delta_path");
    require_positive(in.Delta_k, "Delta_k");

    const Count M_total = in.M_path + in.T_path * (in.M_k + in.T_k);
    const Count Delta_total = in.Delta_k * in.Delta_path;
    const double log2_product = M_total.log2() + Delta_total.log2();

    BoundReport r;
    r.formula_id = "pdim_solution_path";
    r.constant_c = c;
    r.bound_value = c * static_cast<double>(p) * std::max(log2_product, 1.0);
    r.inputs["p"] = static_cast<double>(p);
    record_count(r, "M_path", in.M_path);
    record_count(r, "T_path", in.T_path);
    record_count(r, "Delta_path", in.Delta_path);
    record_count(r, "M_k", in.M_k);
    record_count(r, "T_k", in.T_k);
    record_count(r, "Delta_k", in.Delta_k);
    if (M_total.is_exact()) r.derived["M_total"] = static_cast<double>(*M_total.exact());
    if (Delta_total.is_exact()) r.derived["Delta_total"] = static_cast<double>(*Delta_total.exact());
    r.log2_intermediates["log2_M_total"] = M_total.log2();
    r.log2_intermediates["log2_Delta_total"] = Delta_total.log2();
    r.log2_intermediates["log2_M_total_Delta_total"] = log2_product;
    return r;
}

SolutionPathInputs elastic_net_path_inputs(std::uint64_t d) {
    require_positive(d, "d");
    const Count regions = Count::power(3, d);
    return SolutionPathInputs{
        .M_path = Count(d) * regions,
        .T_path = regions,
        .Delta_path = Count(2 * d),
        .M_k = Count(0),
        .T_k = Count(1),
        .Delta_k = Count(2),
    };
}

BoundReport pdim_group_lasso(std::uint64_t p, std::uint64_t d, double c) {
    require_positive(p, "p");
    require_positive(d, "d");
    const double pd = static_cast<double>(p);
    const double dd = static_cast<double>(d);

    BoundReport r;
    r.formula_id = "pdim_group_lasso";
    r.constant_c = c;
    r.bound_value = c * (pd * pd * pd * dd + pd * pd * dd * dd);
    r.inputs = {{"p", pd}, {"d", dd}};
    const auto fc = group_lasso_fol(p, d);
    r.derived["M_fol"] = static_cast<double>(fc.M);
    r.derived["Delta_fol"] = static_cast<double>(fc.Delta);
    r.log2_intermediates["log2_M_fol"] = std::log2(static_cast<double>(fc.M));
    r.log2_intermediates["log2_block_product"] = std::log2(fc.block_product());
    return r;
}

BoundReport pdim_fused_lasso(std::uint64_t d, double c) {
    require_positive(d, "d");
    const double dd = static_cast<double>(d);

    BoundReport r;
    r.formula_id = "pdim_fused_lasso";
    r.constant_c = c;
    r.bound_value = c * dd * dd;
    r.inputs = {{"d", dd}, {"p", dd - 1.0}};
    // Each of the d-1 dual box constraints is upper, lower or free.
    const Count regions = Count::power(3, d - 1);
    if (regions.is_exact()) r.derived["M_path"] = static_cast<double>(*regions.exact());
    r.log2_intermediates["log2_M_path"] = regions.log2();
    return r;
}

BoundReport pdim_elastic_net(std::uint64_t d, double c) {
    BoundReport r = pdim_solution_path(2, elastic_net_path_inputs(d), c);
    r.formula_id = "pdim_elastic_net";
    r.inputs["d"] = static_cast<double>(d);
    return r;
}

FolComplexity group_lasso_fol(std::uint64_t p, std::uint64_t d) {
    require_positive(p, "p");
    require_positive(d, "d");
    return FolComplexity{
        .M = 2 * (1 + 2 * p),
        .Delta = 2,
        .p = static_cast<std::size_t>(p),
        .dims = {static_cast<std::size_t>(d), static_cast<std::size_t>(d + 2 * p)},
    };
}

std::uint64_t sample_complexity(double pdim, double H, double eps, double delta, double C) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(H > 0.0)) throw std::invalid_argument("H must be > 0");
    if (!(pdim >= 0.0)) throw std::invalid_argument("pdim must be >= 0");
    if (!(C > 0.0)) throw std::invalid_argument("C must be > 0");
    const long double n = static_cast<long double>(C) * (static_cast<long double>(H) * H) /
                          (static_cast<long double>(eps) * eps) *
                          (static_cast<long double>(pdim) + std::log(1.0L / delta));
    const long double up = std::ceil(n);
    if (up > static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
        throw std::overflow_error("sample complexity exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(up);
}

}  // namespace pdtune
