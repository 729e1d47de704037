#include "pdtune/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "pdtune/errors.hpp"

namespace pdtune {

namespace {

const json& field(const json& j, const char* name) {
    if (!j.is_object()) throw std::invalid_argument(std::string("expected an object holding '") + name + "'");
    auto it = j.find(name);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + name + "'");
    return *it;
}

double real_of(const json& j, const std::string& name) {
    if (!j.is_number()) throw std::invalid_argument("field '" + name + "' must be a number");
    return j.get<double>();
}

std::size_t count_of(const json& j, const std::string& name) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) {
        throw std::invalid_argument("field '" + name + "' must be a non-negative integer");
    }
    if (j.is_number_integer() && j.get<long long>() < 0) {
        throw std::invalid_argument("field '" + name + "' must be a non-negative integer");
    }
    return j.get<std::size_t>();
}

std::vector<std::size_t> counts_of(const json& j, const std::string& name) {
    if (!j.is_array()) throw std::invalid_argument("field '" + name + "' must be an array");
    std::vector<std::size_t> out;
    for (const auto& v : j) out.push_back(count_of(v, name));
    return out;
}

std::vector<double> reals_of(const json& j, const std::string& name) {
    if (!j.is_array()) throw std::invalid_argument("field '" + name + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(real_of(v, name));
    return out;
}

const char* op_symbol(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
    }
    return "?";
}

ArithOp op_from(const std::string& s) {
    if (s == "+") return ArithOp::Add;
    if (s == "-") return ArithOp::Sub;
    if (s == "*") return ArithOp::Mul;
    if (s == "/") return ArithOp::Div;
    throw std::invalid_argument("unknown arithmetic op '" + s + "'");
}

json map_to_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

std::map<std::string, double> map_from_json(const json& j, const std::string& name) {
    if (!j.is_object()) throw std::invalid_argument("field '" + name + "' must be an object");
    std::map<std::string, double> m;
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = real_of(it.value(), name + "." + it.key());
    return m;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& name) {
    const auto xs = reals_of(j, name);
    return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json j = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(std::move(row));
    }
    return j;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("field '" + name + "' must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = reals_of(j[r], name);
        if (row.size() != cols) throw std::invalid_argument("field '" + name + "' has ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return m;
}

// ---------------------------------------------------------------- polynomials

json to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"exps", e}, {"coef", c}});
    return {{"nvars", p.nvars()}, {"terms", std::move(terms)}};
}

Polynomial polynomial_from_json(const json& j) {
    const std::size_t n = count_of(field(j, "nvars"), "nvars");
    Polynomial p(n);
    const auto& terms = field(j, "terms");
    if (!terms.is_array()) throw std::invalid_argument("field 'terms' must be an array");
    for (const auto& t : terms) {
        const auto e = counts_of(field(t, "exps"), "exps");
        if (e.size() != n) throw DimensionError("exponent vector length differs from nvars");
        Exponents ex(e.begin(), e.end());
        p += Polynomial::monomial(n, ex, real_of(field(t, "coef"), "coef"));
    }
    return p;
}

json to_json(const RationalFunction& r) {
    return {{"num", to_json(r.numerator())}, {"den", to_json(r.denominator())}};
}

RationalFunction rational_from_json(const json& j) {
    return RationalFunction(polynomial_from_json(field(j, "num")), polynomial_from_json(field(j, "den")));
}

json to_json(const SignPattern& s) {
    json j = json::array();
    for (auto e : s.entries) j.push_back(static_cast<int>(e));
    return j;
}

SignPattern sign_pattern_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("sign pattern must be an array");
    std::vector<std::int8_t> e;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw std::invalid_argument("sign pattern entries must be integers");
        const int s = v.get<int>();
        if (s < -1 || s > 1) throw std::invalid_argument("sign pattern entries must be -1, 0 or 1");
        e.push_back(static_cast<std::int8_t>(s));
    }
    return SignPattern(std::move(e));
}

json to_json(const DomainBox& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

DomainBox domain_box_from_json(const json& j) {
    return DomainBox(reals_of(field(j, "lo"), "lo"), reals_of(field(j, "hi"), "hi"));
}

json to_json(const Complexity& c) { return {{"M", c.M}, {"T", c.T}, {"Delta", c.Delta}}; }

json to_json(const PiecewisePolyFn& f) {
    json bounds = json::array();
    for (const auto& h : f.boundaries()) bounds.push_back(to_json(h));
    json pieces = json::array();
    for (const auto& [s, poly] : f.pieces()) pieces.push_back({{"pattern", to_json(s)}, {"poly", to_json(poly)}});
    return {{"nvars", f.nvars()},
            {"boundaries", std::move(bounds)},
            {"pieces", std::move(pieces)},
            {"box", to_json(f.box())},
            {"zero_tol", f.zero_tol()}};
}

PiecewisePolyFn piecewise_from_json(const json& j, PiecewiseOptions opts) {
    std::vector<Polynomial> bounds;
    for (const auto& h : field(j, "boundaries")) bounds.push_back(polynomial_from_json(h));
    std::map<SignPattern, Polynomial> pieces;
    for (const auto& pc : field(j, "pieces")) {
        auto key = sign_pattern_from_json(field(pc, "pattern"));
        if (pieces.count(key)) throw std::invalid_argument("duplicate piece pattern");
        pieces.emplace(std::move(key), polynomial_from_json(field(pc, "poly")));
    }
    if (j.contains("zero_tol")) opts.zero_tol = real_of(j["zero_tol"], "zero_tol");
    return PiecewisePolyFn(std::move(bounds), std::move(pieces), domain_box_from_json(field(j, "box")), opts);
}

json to_json(const PiecewiseRationalPath& path) {
    json bounds = json::array();
    for (const auto& h : path.boundaries()) bounds.push_back(to_json(h));
    json regions = json::array();
    for (const auto& r : path.regions()) {
        json value = json::array();
        for (const auto& v : r.value) value.push_back(to_json(v));
        regions.push_back({{"pattern", to_json(r.pattern)}, {"support", r.support}, {"value", std::move(value)}});
    }
    return {{"p", path.p()},
            {"d", path.d()},
            {"boundaries", std::move(bounds)},
            {"regions", std::move(regions)},
            {"box", to_json(path.box())},
            {"zero_tol", path.zero_tol()}};
}

PiecewiseRationalPath path_from_json(const json& j) {
    std::vector<RationalFunction> bounds;
    for (const auto& h : field(j, "boundaries")) bounds.push_back(rational_from_json(h));
    std::vector<PathRegion> regions;
    for (const auto& r : field(j, "regions")) {
        PathRegion reg;
        reg.pattern = sign_pattern_from_json(field(r, "pattern"));
        if (r.contains("support")) reg.support = counts_of(r["support"], "support");
        for (const auto& v : field(r, "value")) reg.value.push_back(rational_from_json(v));
        regions.push_back(std::move(reg));
    }
    const double zt = j.contains("zero_tol") ? real_of(j["zero_tol"], "zero_tol") : kDefaultZeroTol;
    return PiecewiseRationalPath(std::move(bounds), std::move(regions), count_of(field(j, "d"), "d"),
                                 domain_box_from_json(field(j, "box")), zt);
}

// ---------------------------------------------------------------- GJ programs

json to_json(const GjProgram& prog) {
    json nodes = json::array();
    for (std::size_t id = 0; id < prog.nodes().size(); ++id) {
        const auto& node = prog.nodes()[id];
        json n = {{"id", id}};
        if (const auto* in = std::get_if<gj::Input>(&node)) {
            n["kind"] = "input";
            n["index"] = in->index;
        } else if (const auto* c = std::get_if<gj::Const>(&node)) {
            n["kind"] = "const";
            n["value"] = c->value;
        } else if (const auto* a = std::get_if<gj::Arith>(&node)) {
            n["kind"] = "arith";
            n["op"] = op_symbol(a->op);
            n["left"] = a->left;
            n["right"] = a->right;
        } else if (const auto* cd = std::get_if<gj::Cond>(&node)) {
            n["kind"] = "cond";
            n["test"] = cd->test;
            n["then"] = cd->then_id;
            n["else"] = cd->else_id;
        }
        nodes.push_back(std::move(n));
    }
    return {{"inputs", prog.inputs()}, {"output", prog.output()}, {"nodes", std::move(nodes)}};
}

GjProgram gj_from_json(const json& j) {
    std::vector<std::pair<std::size_t, GjNode>> labelled;
    const auto& nodes = field(j, "nodes");
    if (!nodes.is_array()) throw std::invalid_argument("field 'nodes' must be an array");
    for (const auto& n : nodes) {
        const std::size_t id = count_of(field(n, "id"), "id");
        const auto kind = field(n, "kind").get<std::string>();
        GjNode node;
        if (kind == "input") {
            node = gj::Input{count_of(field(n, "index"), "index")};
        } else if (kind == "const") {
            node = gj::Const{real_of(field(n, "value"), "value")};
        } else if (kind == "arith") {
            node = gj::Arith{op_from(field(n, "op").get<std::string>()), count_of(field(n, "left"), "left"),
                             count_of(field(n, "right"), "right")};
        } else if (kind == "cond") {
            node = gj::Cond{count_of(field(n, "test"), "test"), count_of(field(n, "then"), "then"),
                            count_of(field(n, "else"), "else")};
        } else {
            throw std::invalid_argument("unknown GJ node kind '" + kind + "'");
        }
        labelled.emplace_back(id, node);
    }
    return gj_from_labelled(count_of(field(j, "inputs"), "inputs"), labelled, count_of(field(j, "output"), "output"));
}

// ---------------------------------------------------------------- bounds

json to_json(const BoundReport& r) {
    return {{"bound_value", r.bound_value},
            {"formula_id", r.formula_id},
            {"inputs", map_to_json(r.inputs)},
            {"derived", map_to_json(r.derived)},
            {"log2_intermediates", map_to_json(r.log2_intermediates)},
            {"constant_c", r.constant_c}};
}

BoundReport bound_report_from_json(const json& j) {
    BoundReport r;
    r.bound_value = real_of(field(j, "bound_value"), "bound_value");
    r.formula_id = field(j, "formula_id").get<std::string>();
    r.inputs = map_from_json(field(j, "inputs"), "inputs");
    if (j.contains("derived")) r.derived = map_from_json(j["derived"], "derived");
    r.log2_intermediates = map_from_json(field(j, "log2_intermediates"), "log2_intermediates");
    r.constant_c = real_of(field(j, "constant_c"), "constant_c");
    return r;
}

json to_json(const FolComplexity& fc) {
    return {{"M", fc.M}, {"Delta", fc.Delta}, {"p", fc.p}, {"dims", fc.dims}};
}

FolComplexity fol_from_json(const json& j) {
    FolComplexity fc;
    fc.M = count_of(field(j, "M"), "M");
    fc.Delta = count_of(field(j, "Delta"), "Delta");
    fc.p = count_of(field(j, "p"), "p");
    fc.dims = j.contains("dims") ? counts_of(j["dims"], "dims") : std::vector<std::size_t>{};
    fc.validate();
    return fc;
}

// ---------------------------------------------------------------- instances

json to_json(const ProblemInstance& x) {
    return {{"A", matrix_to_json(x.A)},
            {"b", vector_to_json(x.b)},
            {"A_val", matrix_to_json(x.A_val)},
            {"b_val", vector_to_json(x.b_val)}};
}

ProblemInstance instance_from_json(const json& j) {
    ProblemInstance x;
    x.A = matrix_from_json(field(j, "A"), "A");
    x.b = vector_from_json(field(j, "b"), "b");
    x.A_val = matrix_from_json(field(j, "A_val"), "A_val");
    x.b_val = vector_from_json(field(j, "b_val"), "b_val");
    x.validate();
    return x;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("instance file " + path.string() + " is not valid JSON: " + e.what());
    }
    return instance_from_json(j);
}

json to_json(const DualSolution& s) {
    json status = json::array();
    for (auto b : s.active_set) {
        status.push_back(b == BoundStatus::Upper ? "upper" : b == BoundStatus::Lower ? "lower" : "free");
    }
    return {{"u", vector_to_json(s.u)}, {"active_set", std::move(status)}, {"duality_gap", s.duality_gap}};
}

// ---------------------------------------------------------------- harness

json to_json(const DistributionSpec& s) {
    json j = {{"kind", to_string(s.kind)},     {"m", s.m},
              {"m_val", s.m_val},              {"d", s.d},
              {"noise_std", s.noise_std},      {"signal_scale", s.signal_scale},
              {"seed", s.seed}};
    switch (s.kind) {
        case DistributionKind::GaussianDense: j["n_active"] = s.n_active; break;
        case DistributionKind::PiecewiseConstant: j["n_changepoints"] = s.n_changepoints; break;
        case DistributionKind::GroupSparse:
            j["block_dims"] = s.resolved_blocks();
            j["active_blocks"] = s.active_blocks;
            break;
    }
    return j;
}

DistributionSpec distribution_from_json(const json& j) {
    DistributionSpec s;
    s.kind = distribution_kind_from_string(field(j, "kind").get<std::string>());
    s.m = count_of(field(j, "m"), "m");
    s.m_val = j.contains("m_val") ? count_of(j["m_val"], "m_val") : s.m;
    s.d = count_of(field(j, "d"), "d");
    if (j.contains("noise_std")) s.noise_std = real_of(j["noise_std"], "noise_std");
    if (j.contains("signal_scale")) s.signal_scale = real_of(j["signal_scale"], "signal_scale");
    if (j.contains("n_active")) s.n_active = count_of(j["n_active"], "n_active");
    if (j.contains("n_changepoints")) s.n_changepoints = count_of(j["n_changepoints"], "n_changepoints");
    if (j.contains("block_dims")) s.block_dims = counts_of(j["block_dims"], "block_dims");
    if (j.contains("active_blocks")) s.active_blocks = count_of(j["active_blocks"], "active_blocks");
    if (j.contains("seed")) s.seed = field(j, "seed").get<std::uint64_t>();
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::set<std::string> known = {"kind", "m", "m_val", "d", "noise_std", "signal_scale",
                                                    "n_active", "n_changepoints", "block_dims", "active_blocks",
                                                    "seed"};
        if (!known.count(it.key())) throw std::invalid_argument("unknown distribution field '" + it.key() + "'");
    }
    s.validate();
    return s;
}

json to_json(const AlphaGrid& g) {
    return {{"lo", g.lo},
            {"hi", g.hi},
            {"points", g.points},
            {"spacing", g.spacing == Spacing::Linear ? "linear" : "log"}};
}

AlphaGrid grid_from_json(const json& j) {
    AlphaGrid g;
    g.lo = reals_of(field(j, "lo"), "lo");
    g.hi = reals_of(field(j, "hi"), "hi");
    g.points = count_of(field(j, "points"), "points");
    const auto sp = j.contains("spacing") ? j["spacing"].get<std::string>() : std::string("log");
    if (sp == "linear") {
        g.spacing = Spacing::Linear;
    } else if (sp == "log" || sp == "logarithmic") {
        g.spacing = Spacing::Logarithmic;
    } else {
        throw std::invalid_argument("field 'spacing' must be 'linear' or 'log'");
    }
    g.validate();
    return g;
}

json to_json(const TuneResult& r) {
    return {{"index", r.index},
            {"alpha_hat", vector_to_json(r.alpha_hat)},
            {"empirical_loss", r.empirical_loss},
            {"mean_losses", r.mean_losses}};
}

json to_json(const GapCurveResult& r) {
    json points = json::array();
    for (const auto& p : r.points) {
        points.push_back({{"N", p.N},
                          {"mean_gap", p.mean_gap},
                          {"std_gap", p.std_gap},
                          {"trials", p.trials},
                          {"failed", p.failed}});
    }
    json failures = json::array();
    for (const auto& t : r.trials) {
        if (!t.ok) failures.push_back({{"N", t.N}, {"trial", t.trial}, {"error", t.error}});
    }
    json j = {{"points", std::move(points)},
              {"H_observed", r.H_observed},
              {"best_index", r.best_index},
              {"population_loss", r.population_loss},
              {"mc_stderr", r.mc_stderr},
              {"failures", std::move(failures)}};
    j["H_clip"] = r.H_clip ? json(*r.H_clip) : json(nullptr);
    return j;
}

json to_json(const ShatterWitness& w) {
    json patterns = json::array();
    const std::size_t n = w.subset.size();
    for (std::size_t code = 0; code < w.columns.size(); ++code) {
        json bits = json::array();
        for (std::size_t k = 0; k < n; ++k) bits.push_back((code >> (n - 1 - k)) & 1U);
        patterns.push_back({{"pattern", std::move(bits)}, {"grid_index", w.columns[code]}});
    }
    return {{"instances", w.subset}, {"thresholds", w.thresholds}, {"patterns", std::move(patterns)}};
}

json to_json(const ShatterResult& r) {
    return {{"size", r.size},
            {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
            {"nodes_visited", r.nodes_visited}};
}

}  // namespace pdtune
