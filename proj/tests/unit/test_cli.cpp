#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "pdtune/cli.hpp"
#include "pdtune/io.hpp"

using namespace pdtune;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("pdtune_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

json tune_config() {
    return json::parse(R"({
        "command": "tune", "seed": 3, "workers": 1, "N": 4,
        "distribution": {"kind": "piecewise-constant", "m": 10, "d": 4},
        "grid": {"lo": [0.01, 0.01, 0.01], "hi": [5, 5, 5], "points": 2, "spacing": "log"}
    })");
}

}  // namespace

TEST_CASE("bounds command") {
    const auto dir = scratch("bounds");
    std::ostringstream err;
    const int rc = cli::run(json{{"command", "bounds"}, {"formula", "fused_lasso"}, {"d", 4}, {"c", 1}}, dir, err);
    REQUIRE(rc == cli::kExitOk);
    const auto doc = json::parse(slurp(dir / "bounds.json"));
    CHECK(doc["result"]["bound_value"] == 16.0);
    CHECK(doc["version"] == kVersion);
    CHECK(doc["config"]["d"] == 4);
    CHECK(doc["config"].contains("tolerances"));
    // re-parsed output equals the in-memory report
    CHECK(doc["result"] == to_json(pdim_fused_lasso(4, 1)));
    const auto csv = slurp(dir / "bounds.csv");
    CHECK(csv.rfind("# columns:", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("solve command with a stored fused instance") {
    const auto dir = scratch("solve");
    ProblemInstance x;
    x.A = Eigen::MatrixXd::Identity(3, 3);
    x.b = Eigen::Vector3d(1, 3, 2);
    x.A_val = x.A;
    x.b_val = x.b;
    {
        std::ofstream f(dir / "inst.json");
        f << to_json(x).dump();
    }
    {
        std::ofstream f(dir / "cfg.json");
        f << json{{"command", "solve"}, {"kind", "fused"}, {"instance", "inst.json"}, {"alpha", {0.5, 0.5}}}.dump();
    }
    std::ostringstream err;
    REQUIRE(cli::run_file(dir / "cfg.json", dir / "out", err) == cli::kExitOk);
    const auto doc = json::parse(slurp(dir / "out" / "solve.json"));
    CHECK(doc["result"].contains("u"));
    CHECK(doc["result"]["theta"].size() == 3);
    CHECK(std::abs(doc["result"]["duality_gap"].get<double>()) <= 1e-7);
    const auto u = fused_lasso_dual_solve(x, Eigen::Vector2d(0.5, 0.5));
    CHECK(doc["result"]["u"] == vector_to_json(u.u));
}

TEST_CASE("schema failures exit 2 with field diagnostics") {
    const auto dir = scratch("schema");
    std::ostringstream err;
    CHECK(cli::run(json{{"command", "frobnicate"}}, dir, err) == cli::kExitSchema);
    const auto doc = json::parse(slurp(dir / "error.json"));
    CHECK(doc["kind"] == "schema");
    CHECK(doc["errors"][0]["field"] == "command");

    std::ostringstream e2;
    CHECK(cli::run(json{{"command", "bounds"}, {"formula", "fused_lasso"}, {"d", 4}, {"colour", 1}}, dir, e2) ==
          cli::kExitSchema);
    CHECK(e2.str().find("colour") != std::string::npos);

    auto no_seed = tune_config();
    no_seed.erase("seed");
    std::ostringstream e3;
    CHECK(cli::run(no_seed, dir, e3) == cli::kExitSchema);
    CHECK(e3.str().find("seed") != std::string::npos);

    std::ostringstream e4;
    CHECK(cli::run(json{{"command", "bounds"}, {"formula", "fused_lasso"}, {"d", 4},
                        {"tolerances", {{"gap_tol", -1.0}}}},
                   dir, e4) == cli::kExitSchema);
    CHECK(cli::run_file(dir / "missing.json", dir, e4) == cli::kExitSchema);
}

TEST_CASE("empty gap curve writes a header-only csv") {
    const auto dir = scratch("gap");
    auto cfg = tune_config();
    cfg.erase("N");
    cfg["command"] = "gapcurve";
    cfg["Ns"] = json::array();
    cfg["trials"] = 2;
    cfg["n_mc"] = 100;
    std::ostringstream err;
    REQUIRE(cli::run(cfg, dir, err) == cli::kExitOk);
    const auto csv = slurp(dir / "gapcurve.csv");
    CHECK(csv == "# columns: kind, N, trial, gap, alpha_hat_1, alpha_hat_2, alpha_hat_3\n"
                 "kind,N,trial,gap,alpha_hat_1,alpha_hat_2,alpha_hat_3\n");
}

TEST_CASE("identical configs give byte-identical outputs") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    std::ostringstream err;
    REQUIRE(cli::run(tune_config(), a, err) == cli::kExitOk);
    REQUIRE(cli::run(tune_config(), b, err) == cli::kExitOk);
    CHECK(slurp(a / "tune.json") == slurp(b / "tune.json"));
    CHECK(slurp(a / "tune.csv") == slurp(b / "tune.csv"));

    const auto doc = json::parse(slurp(a / "tune.json"));
    CHECK(doc["config"]["seed"] == 3);
    CHECK(doc["config"]["distribution"]["d"] == 4);

    // the tune result matches the library call on the same instances
    DistributionSpec s;
    s.kind = DistributionKind::PiecewiseConstant;
    s.m = 10;
    s.m_val = 10;
    s.d = 4;
    s.seed = 3;
    const auto grid = AlphaGrid::cube(3, 0.01, 5, 2, Spacing::Logarithmic);
    const auto r = erm_tune(LossSpec{}, gen_instances(s, 4), grid);
    CHECK(doc["result"] == to_json(r));
}

TEST_CASE("shatter command") {
    const auto dir = scratch("shatter");
    json cfg = {{"command", "shatter"}, {"seed", 2}, {"N", 3}, {"max_N", 3},
                {"distribution", {{"kind", "gaussian-dense"}, {"m", 8}, {"d", 3}}},
                {"grid", {{"lo", {0.001, 0.001}}, {"hi", {1, 1}}, {"points", 6}}}};
    std::ostringstream err;
    REQUIRE(cli::run(cfg, dir, err) == cli::kExitOk);
    const auto doc = json::parse(slurp(dir / "shatter.json"));
    CHECK(doc["result"]["verified"] == true);
}

TEST_CASE("unwritable output exits 1") {
    const auto dir = scratch("unwritable");
    {
        std::ofstream f(dir / "file");
        f << "x";
    }
    std::ostringstream err;
    CHECK(cli::run(json{{"command", "bounds"}, {"formula", "fused_lasso"}, {"d", 4}}, dir / "file" / "sub", err) ==
          cli::kExitRuntime);
    CHECK(err.str().find("runtime") != std::string::npos);
}
