#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pdtune/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pdtune: bounds, solvers and tuning experiments for piecewise-structured losses"};
    std::string config;
    std::string out = ".";
    app.add_option("--config", config, "run configuration (JSON)")->required();
    app.add_option("--out", out, "output directory");
    app.set_version_flag("--version", pdtune::kVersion);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pdtune::cli::kExitSchema;
    }
    return pdtune::cli::run_file(config, out, std::cerr);
}
