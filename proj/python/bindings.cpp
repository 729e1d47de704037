#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdtune/bounds.hpp"
#include "pdtune/errors.hpp"
#include "pdtune/gj.hpp"
#include "pdtune/harness.hpp"
#include "pdtune/io.hpp"
#include "pdtune/regularization.hpp"
#include "pdtune/shatter.hpp"

namespace py = pybind11;
using namespace pdtune;

namespace {

std::vector<int> signs(const SignPattern& s) { return {s.entries.begin(), s.entries.end()}; }

std::vector<int> statuses(const std::vector<BoundStatus>& a) {
    std::vector<int> out;
    for (auto s : a) out.push_back(static_cast<int>(s));
    return out;
}

ProblemKind kind_of(const std::string& s) { return problem_kind_from_string(s); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bounds, solvers and tuning harness for data-driven regularization tuning";
    m.attr("__version__") = kVersion;

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<RankDeficientError>(m, "RankDeficientError", PyExc_ValueError);
    py::register_exception<CycleError>(m, "CycleError", PyExc_ValueError);
    py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
    py::register_exception<BudgetExceededError>(m, "BudgetExceededError", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    // ------------------------------------------------------------ bounds
    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("bound_value", &BoundReport::bound_value)
        .def_readonly("formula_id", &BoundReport::formula_id)
        .def_readonly("inputs", &BoundReport::inputs)
        .def_readonly("derived", &BoundReport::derived)
        .def_readonly("log2_intermediates", &BoundReport::log2_intermediates)
        .def_readonly("constant_c", &BoundReport::constant_c)
        .def("__repr__", [](const BoundReport& r) {
            return "<BoundReport " + r.formula_id + " = " + format_real(r.bound_value) + ">";
        });

    auto fol = [](std::uint64_t M, std::uint64_t Delta, std::size_t p, std::vector<std::size_t> dims) {
        return FolComplexity{M, Delta, p, std::move(dims)};
    };
    m.def("pdim_fol",
          [fol](std::uint64_t M, std::uint64_t Delta, std::size_t p, std::vector<std::size_t> dims, double c) {
              return pdim_fol(fol(M, Delta, p, std::move(dims)), c);
          },
          py::arg("M"), py::arg("Delta"), py::arg("p"), py::arg("dims") = std::vector<std::size_t>{},
          py::arg("c") = kDefaultConstant);
    m.def("qe_complexity",
          [fol](std::uint64_t M, std::uint64_t Delta, std::size_t p, std::vector<std::size_t> dims, double c) {
              const auto q = qe_complexity(fol(M, Delta, p, std::move(dims)), c);
              return py::make_tuple(q.log2_I, q.log2_Delta_QE);
          },
          py::arg("M"), py::arg("Delta"), py::arg("p"), py::arg("dims") = std::vector<std::size_t>{},
          py::arg("c") = kDefaultConstant);
    m.def("pdim_goldberg_jerrum_legacy",
          [fol](std::uint64_t M, std::uint64_t Delta, std::size_t p, std::vector<std::size_t> dims, std::uint64_t q,
                double c) { return pdim_goldberg_jerrum_legacy(fol(M, Delta, p, std::move(dims)), q, c); },
          py::arg("M"), py::arg("Delta"), py::arg("p"), py::arg("dims"), py::arg("q"),
          py::arg("c") = kDefaultConstant);
    m.def("pdim_training", &pdim_training, py::arg("p"), py::arg("d"), py::arg("M_f"), py::arg("T_f"),
          py::arg("Delta_f"), py::arg("c") = kDefaultConstant);
    m.def("pdim_validation", &pdim_validation, py::arg("p"), py::arg("d"), py::arg("M_f"), py::arg("T_f"),
          py::arg("M_g"), py::arg("T_g"), py::arg("Delta_f"), py::arg("Delta_g"), py::arg("c") = kDefaultConstant);
    m.def("pdim_solution_path",
          [](std::uint64_t p, std::uint64_t M_path, std::uint64_t T_path, std::uint64_t Delta_path, std::uint64_t M_k,
             std::uint64_t T_k, std::uint64_t Delta_k, double c) {
              return pdim_solution_path(p, {M_path, T_path, Delta_path, M_k, T_k, Delta_k}, c);
          },
          py::arg("p"), py::arg("M_path"), py::arg("T_path"), py::arg("Delta_path"), py::arg("M_k"), py::arg("T_k"),
          py::arg("Delta_k"), py::arg("c") = kDefaultConstant);
    m.def("pdim_group_lasso", &pdim_group_lasso, py::arg("p"), py::arg("d"), py::arg("c") = kDefaultConstant);
    m.def("pdim_fused_lasso", &pdim_fused_lasso, py::arg("d"), py::arg("c") = kDefaultConstant);
    m.def("pdim_elastic_net", &pdim_elastic_net, py::arg("d"), py::arg("c") = kDefaultConstant);
    m.def("sample_complexity", &sample_complexity, py::arg("pdim"), py::arg("H"), py::arg("eps"), py::arg("delta"),
          py::arg("C") = 1.0);

    // GJ programs come in as their JSON text
    m.def("gj_analyze",
          [](const std::string& program, std::size_t p, double c) {
              const auto prog = gj_from_json(json::parse(program));
              py::dict out;
              out["degree"] = gj_degree(prog);
              out["predicates"] = gj_predicate_complexity(prog);
              out["bound"] = gj_pdim_bound(prog, p, c);
              return out;
          },
          py::arg("program"), py::arg("p"), py::arg("c") = kDefaultConstant);

    // ------------------------------------------------------------ solvers
    py::class_<ProblemInstance>(m, "ProblemInstance")
        .def(py::init([](Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::MatrixXd A_val, Eigen::VectorXd b_val) {
                 ProblemInstance x{std::move(A), std::move(b), std::move(A_val), std::move(b_val)};
                 x.validate();
                 return x;
             }),
             py::arg("A"), py::arg("b"), py::arg("A_val"), py::arg("b_val"))
        .def_readonly("A", &ProblemInstance::A)
        .def_readonly("b", &ProblemInstance::b)
        .def_readonly("A_val", &ProblemInstance::A_val)
        .def_readonly("b_val", &ProblemInstance::b_val)
        .def_property_readonly("d", &ProblemInstance::d);

    py::class_<RegionSolution>(m, "RegionSolution")
        .def_readonly("theta", &RegionSolution::theta)
        .def_property_readonly("sign_pattern", [](const RegionSolution& s) { return signs(s.sign_pattern); })
        .def_readonly("kkt_residual", &RegionSolution::kkt_residual)
        .def_readonly("iterations", &RegionSolution::iterations);

    py::class_<DualSolution>(m, "DualSolution")
        .def_readonly("u", &DualSolution::u)
        .def_property_readonly("active_set", [](const DualSolution& s) { return statuses(s.active_set); })
        .def_readonly("duality_gap", &DualSolution::duality_gap);

    py::class_<GroupLassoResult>(m, "GroupLassoResult")
        .def_readonly("theta", &GroupLassoResult::theta)
        .def_readonly("kkt_residual", &GroupLassoResult::kkt_residual)
        .def_readonly("iterations", &GroupLassoResult::iterations)
        .def_readonly("objective_trace", &GroupLassoResult::objective_trace);

    m.def("elastic_net_solve",
          [](const ProblemInstance& x, double a1, double a2) { return elastic_net_solve(x, a1, a2); }, py::arg("x"),
          py::arg("alpha1"), py::arg("alpha2"));
    m.def("fused_lasso_dual_solve",
          [](const ProblemInstance& x, const Eigen::VectorXd& alpha) { return fused_lasso_dual_solve(x, alpha); },
          py::arg("x"), py::arg("alpha"));
    m.def("fused_lasso_brute_force",
          [](const ProblemInstance& x, const Eigen::VectorXd& alpha) { return fused_lasso_brute_force(x, alpha); },
          py::arg("x"), py::arg("alpha"));
    m.def("fused_lasso_primal_recover",
          [](const ProblemInstance& x, const DualSolution& u) { return fused_lasso_primal_recover(x, u); },
          py::arg("x"), py::arg("u"));
    m.def("fused_lasso_primal_objective", &fused_lasso_primal_objective, py::arg("x"), py::arg("theta"),
          py::arg("alpha"));
    m.def("group_lasso_solve",
          [](const ProblemInstance& x, const Eigen::VectorXd& alpha, const std::vector<std::size_t>& blocks,
             bool record_objective) {
              GroupLassoConfig cfg;
              cfg.record_objective = record_objective;
              return group_lasso_solve(x, alpha, blocks, cfg);
          },
          py::arg("x"), py::arg("alpha"), py::arg("block_dims"), py::arg("record_objective") = false);
    m.def("validation_loss",
          [](const ProblemInstance& x, const Eigen::VectorXd& theta, const std::string& kind) {
              return validation_loss(x, theta, kind_of(kind));
          },
          py::arg("x"), py::arg("theta"), py::arg("kind"));

    // ------------------------------------------------------------ harness
    py::class_<DistributionSpec>(m, "DistributionSpec")
        .def(py::init([](const std::string& kind, std::size_t m_, std::size_t m_val, std::size_t d, double noise_std,
                         double signal_scale, std::size_t n_changepoints, std::uint64_t seed) {
                 DistributionSpec s;
                 s.kind = distribution_kind_from_string(kind);
                 s.m = m_;
                 s.m_val = m_val;
                 s.d = d;
                 s.noise_std = noise_std;
                 s.signal_scale = signal_scale;
                 s.n_changepoints = n_changepoints;
                 s.seed = seed;
                 s.validate();
                 return s;
             }),
             py::arg("kind") = "piecewise-constant", py::arg("m") = 20, py::arg("m_val") = 20, py::arg("d") = 5,
             py::arg("noise_std") = 1.0, py::arg("signal_scale") = 1.0, py::arg("n_changepoints") = 1,
             py::arg("seed") = 0)
        .def_readwrite("m", &DistributionSpec::m)
        .def_readwrite("m_val", &DistributionSpec::m_val)
        .def_readwrite("d", &DistributionSpec::d)
        .def_readwrite("noise_std", &DistributionSpec::noise_std)
        .def_readwrite("seed", &DistributionSpec::seed)
        .def_property_readonly("kind", [](const DistributionSpec& s) { return to_string(s.kind); });

    py::class_<AlphaGrid>(m, "AlphaGrid")
        .def(py::init([](std::size_t p, double lo, double hi, std::size_t points, const std::string& spacing) {
                 if (spacing != "log" && spacing != "linear") throw py::value_error("spacing must be 'log' or 'linear'");
                 auto g = AlphaGrid::cube(p, lo, hi, points, spacing == "log" ? Spacing::Logarithmic : Spacing::Linear);
                 g.validate();
                 return g;
             }),
             py::arg("p"), py::arg("lo"), py::arg("hi"), py::arg("points"), py::arg("spacing") = "log")
        .def_property_readonly("size", &AlphaGrid::size)
        .def("point", &AlphaGrid::point);

    py::class_<TuneResult>(m, "TuneResult")
        .def_readonly("index", &TuneResult::index)
        .def_readonly("alpha_hat", &TuneResult::alpha_hat)
        .def_readonly("empirical_loss", &TuneResult::empirical_loss)
        .def_readonly("mean_losses", &TuneResult::mean_losses);

    py::class_<GapCurvePoint>(m, "GapCurvePoint")
        .def_readonly("N", &GapCurvePoint::N)
        .def_readonly("mean_gap", &GapCurvePoint::mean_gap)
        .def_readonly("std_gap", &GapCurvePoint::std_gap)
        .def_readonly("trials", &GapCurvePoint::trials)
        .def_readonly("failed", &GapCurvePoint::failed);

    py::class_<GapCurveResult>(m, "GapCurveResult")
        .def_readonly("points", &GapCurveResult::points)
        .def_readonly("H_observed", &GapCurveResult::H_observed)
        .def_readonly("population_loss", &GapCurveResult::population_loss)
        .def_readonly("best_index", &GapCurveResult::best_index);

    auto loss_spec = [](const std::string& kind, std::vector<std::size_t> blocks) {
        LossSpec s;
        s.kind = kind_of(kind);
        s.block_dims = std::move(blocks);
        return s;
    };

    m.def("gen_instances", &gen_instances, py::arg("spec"), py::arg("N"));
    m.def("bilevel_loss",
          [loss_spec](const std::string& kind, const ProblemInstance& x, const Eigen::VectorXd& alpha,
                      std::vector<std::size_t> blocks) { return bilevel_loss(loss_spec(kind, std::move(blocks)), x, alpha); },
          py::arg("kind"), py::arg("x"), py::arg("alpha"), py::arg("block_dims") = std::vector<std::size_t>{});
    m.def("erm_tune",
          [loss_spec](const std::string& kind, const std::vector<ProblemInstance>& xs, const AlphaGrid& grid,
                      std::vector<std::size_t> blocks, std::size_t workers) {
              py::gil_scoped_release nogil;
              return erm_tune(loss_spec(kind, std::move(blocks)), xs, grid, workers);
          },
          py::arg("kind"), py::arg("instances"), py::arg("grid"), py::arg("block_dims") = std::vector<std::size_t>{},
          py::arg("workers") = 1);
    m.def("gap_curve",
          [loss_spec](const std::string& kind, const DistributionSpec& dist, const AlphaGrid& grid,
                      std::vector<std::size_t> Ns, std::size_t trials, std::size_t n_mc, std::size_t workers) {
              GapCurveConfig cfg;
              cfg.Ns = std::move(Ns);
              cfg.trials = trials;
              cfg.n_mc = n_mc;
              cfg.workers = workers;
              py::gil_scoped_release nogil;
              return gap_curve(loss_spec(kind, {}), dist, grid, cfg);
          },
          py::arg("kind"), py::arg("dist"), py::arg("grid"), py::arg("Ns"), py::arg("trials") = 30,
          py::arg("n_mc") = 2000, py::arg("workers") = 1);
    m.def("loglog_slope", &loglog_slope, py::arg("points"));

    // ------------------------------------------------------------ shattering
    m.def("max_shattered",
          [](const Eigen::MatrixXd& L, std::size_t max_N, std::size_t budget) {
              const LossMatrix lm{L};
              const auto r = max_shattered(lm, max_N, budget);
              py::dict out;
              out["size"] = r.size;
              out["nodes_visited"] = r.nodes_visited;
              if (r.witness) {
                  out["subset"] = r.witness->subset;
                  out["thresholds"] = r.witness->thresholds;
                  out["columns"] = r.witness->columns;
                  out["verified"] = verify_witness(lm, *r.witness);
              } else {
                  out["subset"] = py::none();
              }
              return out;
          },
          py::arg("L"), py::arg("max_N") = kDefaultMaxShatter, py::arg("node_budget") = kDefaultShatterBudget);
}
