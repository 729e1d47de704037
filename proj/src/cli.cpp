#include "pdtune/cli.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pdtune/errors.hpp"

namespace pdtune::cli {

namespace fs = std::filesystem;

namespace {

struct SchemaFailure : std::runtime_error {
    explicit SchemaFailure(std::vector<FieldError> e)
        : std::runtime_error("config does not match the schema"), errors(std::move(e)) {}
    SchemaFailure(const std::string& field, const std::string& message)
        : SchemaFailure(std::vector<FieldError>{{field, message}}) {}
    std::vector<FieldError> errors;
};

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reads fields from one JSON object, fills defaults into `resolved`, and
// collects every problem instead of stopping at the first.
class Reader {
public:
    Reader(const json& j, std::string prefix, std::vector<FieldError>& errors)
        : j_(j), prefix_(std::move(prefix)), errors_(errors) {
        if (!j_.is_object()) fail("", "must be a JSON object");
    }

    json resolved = json::object();

    bool has(const std::string& name) const { return j_.is_object() && j_.contains(name); }

    std::string string(const std::string& name, std::optional<std::string> def = std::nullopt) {
        const json* v = get(name, def.has_value());
        if (!v) return record(name, def.value_or(""));
        if (!v->is_string()) return fail(name, "must be a string"), std::string();
        return record(name, v->get<std::string>());
    }

    std::uint64_t count(const std::string& name, std::optional<std::uint64_t> def = std::nullopt,
                        std::uint64_t min = 0) {
        const json* v = get(name, def.has_value());
        if (!v) return record(name, def.value_or(0));
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
            return fail(name, "must be a non-negative integer"), 0;
        }
        const auto x = v->get<std::uint64_t>();
        if (x < min) return fail(name, "must be >= " + std::to_string(min)), 0;
        return record(name, x);
    }

    double real(const std::string& name, std::optional<double> def = std::nullopt, bool positive = false) {
        const json* v = get(name, def.has_value());
        if (!v) return record(name, def.value_or(0.0));
        if (!v->is_number()) return fail(name, "must be a number"), 0.0;
        const double x = v->get<double>();
        if (positive && !(x > 0.0)) return fail(name, "must be > 0"), 0.0;
        return record(name, x);
    }

    std::optional<double> optional_positive(const std::string& name) {
        if (!has(name) || j_[name].is_null()) {
            used_.insert(name);
            resolved[name] = nullptr;
            return std::nullopt;
        }
        return real(name, std::nullopt, true);
    }

    std::vector<std::size_t> counts(const std::string& name, std::optional<std::vector<std::size_t>> def = std::nullopt) {
        const json* v = get(name, def.has_value());
        if (!v) return record(name, def.value_or(std::vector<std::size_t>{}));
        std::vector<std::size_t> out;
        if (!v->is_array()) return fail(name, "must be an array of non-negative integers"), out;
        for (const auto& e : *v) {
            if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0)) {
                return fail(name, "must be an array of non-negative integers"), std::vector<std::size_t>{};
            }
            out.push_back(e.get<std::size_t>());
        }
        return record(name, out);
    }

    Eigen::VectorXd reals(const std::string& name) {
        const json* v = get(name, false);
        if (!v) return {};
        if (!v->is_array()) return fail(name, "must be an array of numbers"), Eigen::VectorXd();
        for (const auto& e : *v) {
            if (!e.is_number()) return fail(name, "must be an array of numbers"), Eigen::VectorXd();
        }
        resolved[name] = *v;
        return vector_from_json(*v, name);
    }

    // Raw sub-document; parsed by the caller.
    const json* raw(const std::string& name, bool required = true) {
        const json* v = get(name, !required);
        if (v) resolved[name] = *v;
        return v;
    }

    void fail(const std::string& name, const std::string& message) {
        errors_.push_back({path(name), message});
    }

    // Unknown keys are schema errors.
    void finish() {
        if (!j_.is_object()) return;
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) fail(it.key(), "unknown field");
        }
    }

    void allow(const std::string& name) { used_.insert(name); }

private:
    const json* get(const std::string& name, bool optional) {
        used_.insert(name);
        if (!j_.is_object() || !j_.contains(name)) {
            if (!optional) fail(name, "is required");
            return nullptr;
        }
        return &j_[name];
    }

    template <class T>
    T record(const std::string& name, T value) {
        resolved[name] = value;
        return value;
    }

    std::string path(const std::string& name) const {
        if (name.empty()) return prefix_.empty() ? "<root>" : prefix_;
        return prefix_.empty() ? name : prefix_ + "." + name;
    }

    const json& j_;
    std::string prefix_;
    std::vector<FieldError>& errors_;
    std::set<std::string> used_;
};

struct Output {
    json result;
    std::vector<std::string> csv_columns;
    std::vector<std::vector<std::string>> csv_rows;
    bool has_csv = false;
};

struct Common {
    double c = 1.0;
    std::size_t workers = 0;
    std::uint64_t seed = 0;
    LossSpec loss;
};

void read_tolerances(Reader& top, Common& common, std::vector<FieldError>& errors) {
    const json* tj = top.raw("tolerances", false);
    static const json empty = json::object();
    Reader t(tj ? *tj : empty, "tolerances", errors);
    auto& L = common.loss;
    const double zero_tol = t.real("zero_tol", kDefaultZeroTol, true);
    L.elastic.zero_tol = zero_tol;
    L.elastic.change_tol = t.real("elastic_change_tol", L.elastic.change_tol, true);
    L.elastic.kkt_tol = t.real("elastic_kkt_tol", L.elastic.kkt_tol, true);
    L.fused.active_tol = t.real("active_tol", L.fused.active_tol, true);
    L.fused.gap_tol = t.real("gap_tol", L.fused.gap_tol, true);
    L.fused.rank_tol = t.real("rank_tol", L.fused.rank_tol, true);
    L.group.kkt_tol = t.real("group_kkt_tol", L.group.kkt_tol, true);
    t.finish();
    top.resolved["tolerances"] = t.resolved;
}

std::string cell(double v) { return format_real(v); }
std::string cell(std::size_t v) { return std::to_string(v); }

ProblemKind read_kind(Reader& r, std::optional<ProblemKind> def) {
    const std::string s = r.string("kind", def ? std::optional<std::string>(to_string(*def)) : std::nullopt);
    try {
        return problem_kind_from_string(s);
    } catch (const std::invalid_argument&) {
        r.fail("kind", "must be one of elastic, fused, group");
        return ProblemKind::FusedLasso;
    }
}

template <class F>
auto parse_sub(Reader& r, const std::string& name, std::vector<FieldError>& errors, F&& parse)
    -> std::optional<decltype(parse(std::declval<const json&>()))> {
    const json* v = r.raw(name);
    if (!v) return std::nullopt;
    try {
        return parse(*v);
    } catch (const std::exception& e) {
        errors.push_back({name, e.what()});
        return std::nullopt;
    }
}

void throw_if(std::vector<FieldError>& errors) {
    if (!errors.empty()) throw SchemaFailure(errors);
}

// ---------------------------------------------------------------- bounds

Output cmd_bounds(Reader& r, const Common& common, std::vector<FieldError>& errors) {
    const std::string formula = r.string("formula");
    const double c = common.c;
    Output out;
    std::optional<BoundReport> report;

    auto fol = [&] {
        FolComplexity fc;
        fc.M = r.count("M", std::nullopt, 1);
        fc.Delta = r.count("Delta", std::nullopt, 1);
        fc.p = r.count("p", std::nullopt, 1);
        fc.dims = r.counts("dims", std::vector<std::size_t>{});
        for (auto dk : fc.dims) {
            if (dk < 1) r.fail("dims", "entries must be >= 1");
        }
        return fc;
    };

    if (formula == "qe_complexity") {
        const auto fc = fol();
        r.finish();
        throw_if(errors);
        const auto qe = qe_complexity(fc, c);
        out.result = {{"formula_id", "qe_complexity"}, {"log2_I", qe.log2_I}, {"log2_Delta_QE", qe.log2_Delta_QE},
                      {"constant_c", c}};
        out.has_csv = true;
        out.csv_columns = {"formula_id", "log2_I", "log2_Delta_QE", "constant_c"};
        out.csv_rows.push_back({"qe_complexity", cell(qe.log2_I), cell(qe.log2_Delta_QE), cell(c)});
        return out;
    }
    if (formula == "sample_complexity") {
        const double pdim = r.real("pdim");
        const double H = r.real("H", std::nullopt, true);
        const double eps = r.real("eps", std::nullopt, true);
        const double delta = r.real("delta", std::nullopt, true);
        const double C = r.real("C", 1.0, true);
        r.finish();
        throw_if(errors);
        const auto N = sample_complexity(pdim, H, eps, delta, C);
        out.result = {{"formula_id", "sample_complexity"}, {"N", N}};
        out.has_csv = true;
        out.csv_columns = {"formula_id", "N"};
        out.csv_rows.push_back({"sample_complexity", std::to_string(N)});
        return out;
    }

    std::function<BoundReport()> compute;
    if (formula == "fol") {
        const auto fc = fol();
        compute = [=] { return pdim_fol(fc, c); };
    } else if (formula == "legacy") {
        const auto fc = fol();
        const auto q = r.count("q", std::nullopt, 0);
        compute = [=] { return pdim_goldberg_jerrum_legacy(fc, q, c); };
    } else if (formula == "training") {
        const auto p = r.count("p"), d = r.count("d"), M = r.count("M_f"), T = r.count("T_f"), D = r.count("Delta_f");
        compute = [=] { return pdim_training(p, d, M, T, D, c); };
    } else if (formula == "validation") {
        const auto p = r.count("p"), d = r.count("d"), Mf = r.count("M_f"), Tf = r.count("T_f");
        const auto Mg = r.count("M_g"), Tg = r.count("T_g"), Df = r.count("Delta_f"), Dg = r.count("Delta_g");
        compute = [=] { return pdim_validation(p, d, Mf, Tf, Mg, Tg, Df, Dg, c); };
    } else if (formula == "solution_path") {
        const auto p = r.count("p");
        SolutionPathInputs in{r.count("M_path"), r.count("T_path"), r.count("Delta_path"),
                              r.count("M_k"),    r.count("T_k"),    r.count("Delta_k")};
        compute = [=] { return pdim_solution_path(p, in, c); };
    } else if (formula == "group_lasso") {
        const auto p = r.count("p"), d = r.count("d");
        compute = [=] { return pdim_group_lasso(p, d, c); };
    } else if (formula == "fused_lasso") {
        const auto d = r.count("d");
        compute = [=] { return pdim_fused_lasso(d, c); };
    } else if (formula == "elastic_net") {
        const auto d = r.count("d");
        compute = [=] { return pdim_elastic_net(d, c); };
    } else if (formula == "gj") {
        const auto p = r.count("p", std::nullopt, 1);
        auto prog = parse_sub(r, "program", errors, [](const json& j) { return gj_from_json(j); });
        if (prog) {
            const GjProgram g = *prog;
            compute = [=] { return gj_pdim_bound(g, p, c); };
        }
    } else if (!formula.empty()) {
        r.fail("formula",
               "must be one of qe_complexity, fol, legacy, training, validation, solution_path, group_lasso, "
               "fused_lasso, elastic_net, gj, sample_complexity");
    }
    r.finish();
    throw_if(errors);
    try {
        report = compute();
    } catch (const std::invalid_argument& e) {
        throw SchemaFailure("formula", e.what());
    }
    out.result = to_json(*report);
    out.has_csv = true;
    out.csv_columns = {"formula_id", "bound_value", "constant_c"};
    out.csv_rows.push_back({report->formula_id, cell(report->bound_value), cell(report->constant_c)});
    return out;
}

// ---------------------------------------------------------------- solve

Output cmd_solve(Reader& r, const Common& common, const fs::path& base, std::vector<FieldError>& errors) {
    const ProblemKind kind = read_kind(r, std::nullopt);
    const Eigen::VectorXd alpha = r.reals("alpha");
    const auto blocks = kind == ProblemKind::GroupLasso ? r.counts("block_dims") : std::vector<std::size_t>{};
    std::optional<ProblemInstance> x;
    if (const json* inst = r.raw("instance")) {
        if (inst->is_string()) {
            fs::path p = inst->get<std::string>();
            if (p.is_relative()) p = base / p;
            if (!fs::exists(p)) throw RuntimeFailure("instance file " + p.string() + " does not exist");
            try {
                x = load_instance(p);
            } catch (const std::invalid_argument& e) {
                errors.push_back({"instance", e.what()});
            }
        } else {
            try {
                x = instance_from_json(*inst);
            } catch (const std::exception& e) {
                errors.push_back({"instance", e.what()});
            }
        }
    }
    r.finish();
    throw_if(errors);

    LossSpec loss = common.loss;
    loss.kind = kind;
    loss.block_dims = blocks;
    Output out;
    Eigen::VectorXd theta;
    try {
        switch (kind) {
            case ProblemKind::ElasticNet: {
                if (alpha.size() != 2) throw SchemaFailure("alpha", "elastic net takes [alpha1, alpha2]");
                const auto s = elastic_net_solve(*x, alpha(0), alpha(1), loss.elastic);
                theta = s.theta;
                out.result = {{"theta", vector_to_json(s.theta)},
                              {"sign_pattern", to_json(s.sign_pattern)},
                              {"kkt_residual", s.kkt_residual},
                              {"iterations", s.iterations}};
                break;
            }
            case ProblemKind::FusedLasso: {
                if (alpha.size() != x->d() - 1) throw SchemaFailure("alpha", "fused lasso takes d-1 weights");
                const auto qp = fused_lasso_dual_qp(*x, loss.fused);
                const auto s = fused_lasso_dual_solve(qp, *x, alpha, loss.fused);
                theta = fused_lasso_primal_recover(qp, s.u);
                out.result = to_json(s);
                out.result["theta"] = vector_to_json(theta);
                break;
            }
            case ProblemKind::GroupLasso: {
                if (alpha.size() != static_cast<Eigen::Index>(blocks.size())) {
                    throw SchemaFailure("alpha", "group lasso takes one weight per block");
                }
                const auto s = group_lasso_solve(*x, alpha, blocks, loss.group);
                theta = s.theta;
                out.result = {{"theta", vector_to_json(s.theta)},
                              {"kkt_residual", s.kkt_residual},
                              {"iterations", s.iterations}};
                break;
            }
        }
    } catch (const DimensionError& e) {
        throw SchemaFailure("instance", e.what());
    }
    out.result["kind"] = to_string(kind);
    out.result["validation_loss"] = validation_loss(*x, theta, kind);
    out.has_csv = true;
    out.csv_columns = {"index", "theta"};
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        out.csv_rows.push_back({cell(static_cast<std::size_t>(i)), cell(theta(i))});
    }
    return out;
}

// ---------------------------------------------------------------- stochastic commands

struct TuningSetup {
    DistributionSpec dist;
    AlphaGrid grid;
    LossSpec loss;
};

std::optional<TuningSetup> read_setup(Reader& r, const Common& common, std::vector<FieldError>& errors) {
    auto dist = parse_sub(r, "distribution", errors, [&](const json& j) {
        if (j.is_object() && j.contains("seed")) throw std::invalid_argument("seed belongs at the top level");
        json copy = j;
        copy["seed"] = common.seed;
        return distribution_from_json(copy);
    });
    auto grid = parse_sub(r, "grid", errors, [](const json& j) { return grid_from_json(j); });
    std::optional<ProblemKind> def;
    if (dist) def = dist->problem_kind();
    const ProblemKind kind = read_kind(r, def.value_or(ProblemKind::FusedLasso));
    std::vector<std::size_t> blocks;
    if (kind == ProblemKind::GroupLasso) {
        blocks = r.counts("block_dims", dist ? std::optional(dist->resolved_blocks()) : std::nullopt);
    }
    if (!dist || !grid) return std::nullopt;
    TuningSetup s{*dist, *grid, common.loss};
    s.loss.kind = kind;
    s.loss.block_dims = blocks;
    if (s.loss.alpha_dim(s.dist.d) != s.grid.p()) {
        errors.push_back({"grid", "has " + std::to_string(s.grid.p()) + " dimensions but the " + to_string(kind) +
                                      " loss needs " + std::to_string(s.loss.alpha_dim(s.dist.d))});
    }
    return s;
}

std::vector<std::string> alpha_columns(const std::string& prefix, std::size_t p) {
    std::vector<std::string> cols;
    for (std::size_t k = 0; k < p; ++k) cols.push_back(prefix + "_" + std::to_string(k + 1));
    return cols;
}

Output cmd_tune(Reader& r, const Common& common, std::vector<FieldError>& errors) {
    auto setup = read_setup(r, common, errors);
    const auto N = r.count("N", std::nullopt, 1);
    r.finish();
    throw_if(errors);
    const auto instances = gen_instances(setup->dist, N);
    const auto res = erm_tune(setup->loss, instances, setup->grid, common.workers);
    Output out;
    out.result = to_json(res);
    out.has_csv = true;
    out.csv_columns = {"grid_index"};
    for (auto& c : alpha_columns("alpha", setup->grid.p())) out.csv_columns.push_back(c);
    out.csv_columns.push_back("mean_loss");
    for (std::size_t j = 0; j < res.mean_losses.size(); ++j) {
        std::vector<std::string> row{cell(j)};
        const auto a = setup->grid.point(j);
        for (Eigen::Index k = 0; k < a.size(); ++k) row.push_back(cell(a(k)));
        row.push_back(cell(res.mean_losses[j]));
        out.csv_rows.push_back(std::move(row));
    }
    return out;
}

Output cmd_gapcurve(Reader& r, const Common& common, std::vector<FieldError>& errors) {
    auto setup = read_setup(r, common, errors);
    GapCurveConfig cfg;
    cfg.Ns = r.counts("Ns");
    for (auto N : cfg.Ns) {
        if (N < 1) r.fail("Ns", "entries must be >= 1");
    }
    cfg.trials = r.count("trials", 30, 1);
    cfg.n_mc = r.count("n_mc", 2000, 100);
    cfg.clip_H = r.optional_positive("clip_H");
    cfg.workers = common.workers;
    r.finish();
    throw_if(errors);
    const auto res = gap_curve(setup->loss, setup->dist, setup->grid, cfg);
    Output out;
    out.result = to_json(res);
    out.result["slope"] = nullptr;
    try {
        out.result["slope"] = loglog_slope(res.points);
    } catch (const std::invalid_argument&) {
    }
    out.has_csv = true;
    out.csv_columns = {"kind", "N", "trial", "gap"};
    for (auto& c : alpha_columns("alpha_hat", setup->grid.p())) out.csv_columns.push_back(c);
    for (const auto& t : res.trials) {
        if (!t.ok) continue;
        std::vector<std::string> row{to_string(setup->loss.kind), cell(t.N), cell(t.trial), cell(t.gap)};
        for (Eigen::Index k = 0; k < t.alpha_hat.size(); ++k) row.push_back(cell(t.alpha_hat(k)));
        out.csv_rows.push_back(std::move(row));
    }
    return out;
}

Output cmd_shatter(Reader& r, const Common& common, std::vector<FieldError>& errors) {
    auto setup = read_setup(r, common, errors);
    const auto N = r.count("N", std::nullopt, 1);
    const auto max_N = r.count("max_N", kDefaultMaxShatter);
    if (max_N > 20) r.fail("max_N", "must be <= 20");
    const auto budget = r.count("node_budget", kDefaultShatterBudget, 1);
    r.finish();
    throw_if(errors);
    const auto L = loss_matrix(setup->loss, gen_instances(setup->dist, N), setup->grid, common.workers);
    const auto res = max_shattered(L, max_N, budget);
    Output out;
    out.result = to_json(res);
    out.result["verified"] = res.witness ? verify_witness(L, *res.witness) : true;
    out.has_csv = true;
    out.csv_columns = {"pattern", "grid_index"};
    if (res.witness) {
        const auto& w = *res.witness;
        const std::size_t n = w.subset.size();
        for (std::size_t code = 0; code < w.columns.size(); ++code) {
            std::string bits;
            for (std::size_t k = 0; k < n; ++k) bits += ((code >> (n - 1 - k)) & 1U) ? '1' : '0';
            out.csv_rows.push_back({bits, cell(w.columns[code])});
        }
    }
    return out;
}

// ---------------------------------------------------------------- output

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw RuntimeFailure("cannot write " + p.string());
    f << text;
    if (!f) throw RuntimeFailure("failed writing " + p.string());
}

std::string render_csv(const Output& out) {
    std::ostringstream s;
    s << "# columns:";
    for (std::size_t i = 0; i < out.csv_columns.size(); ++i) s << (i ? ", " : " ") << out.csv_columns[i];
    s << '\n';
    for (std::size_t i = 0; i < out.csv_columns.size(); ++i) s << (i ? "," : "") << out.csv_columns[i];
    s << '\n';
    for (const auto& row : out.csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << row[i];
        s << '\n';
    }
    return s.str();
}

json error_doc(const std::string& kind, const std::string& message, const std::vector<FieldError>& fields) {
    json errs = json::array();
    for (const auto& f : fields) errs.push_back({{"field", f.field}, {"message", f.message}});
    return {{"status", "error"}, {"kind", kind}, {"message", message}, {"errors", std::move(errs)}, {"version", kVersion}};
}

int report(const json& doc, int status, const fs::path& out_dir, std::ostream& err) {
    err << doc.dump(2) << '\n';
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
        std::ofstream f(out_dir / "error.json", std::ios::binary | std::ios::trunc);
        if (f) f << doc.dump(2) << '\n';
    }
    return status;
}

int run_impl(const json& config, const fs::path& out_dir, const fs::path& base, std::ostream& err) {
    std::vector<FieldError> errors;
    try {
        Reader top(config, "", errors);
        if (!errors.empty()) throw SchemaFailure(errors);
        const std::string command = top.string("command");
        static const std::set<std::string> commands = {"bounds", "solve", "tune", "gapcurve", "shatter"};
        if (!command.empty() && !commands.count(command)) {
            top.fail("command", "must be one of bounds, solve, tune, gapcurve, shatter");
        }
        throw_if(errors);

        Common common;
        const bool stochastic = command == "tune" || command == "gapcurve" || command == "shatter";
        common.seed = stochastic ? top.count("seed") : top.count("seed", 0);
        common.c = top.real("c", kDefaultConstant, true);
        common.workers = top.count("workers", 0);
        top.raw("out", false);  // accepted for provenance; --out decides the directory
        read_tolerances(top, common, errors);

        Output out;
        if (command == "bounds") {
            out = cmd_bounds(top, common, errors);
        } else if (command == "solve") {
            out = cmd_solve(top, common, base, errors);
        } else if (command == "tune") {
            out = cmd_tune(top, common, errors);
        } else if (command == "gapcurve") {
            out = cmd_gapcurve(top, common, errors);
        } else {
            out = cmd_shatter(top, common, errors);
        }

        json doc = {{"version", kVersion}, {"command", command}, {"config", top.resolved}, {"result", out.result}};
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw RuntimeFailure("cannot create output directory " + out_dir.string() + ": " + ec.message());
        write_text(out_dir / (command + ".json"), doc.dump(2) + "\n");
        if (out.has_csv) write_text(out_dir / (command + ".csv"), render_csv(out));
        return kExitOk;
    } catch (const SchemaFailure& e) {
        return report(error_doc("schema", e.what(), e.errors), kExitSchema, out_dir, err);
    } catch (const std::exception& e) {
        return report(error_doc("runtime", e.what(), {}), kExitRuntime, out_dir, err);
    }
}

}  // namespace

int run(const json& config, const fs::path& out_dir, std::ostream& err) {
    return run_impl(config, out_dir, fs::current_path(), err);
}

int run_file(const fs::path& config_path, const fs::path& out_dir, std::ostream& err) {
    std::ifstream in(config_path);
    if (!in) {
        return report(error_doc("schema", "cannot read config file " + config_path.string(), {{"--config", "unreadable"}}),
                      kExitSchema, out_dir, err);
    }
    json config;
    try {
        in >> config;
    } catch (const json::parse_error& e) {
        return report(error_doc("schema", "config is not valid JSON", {{"<root>", e.what()}}), kExitSchema, out_dir, err);
    }
    return run_impl(config, out_dir, config_path.parent_path(), err);
}

}  // namespace pdtune::cli
