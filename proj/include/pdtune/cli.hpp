#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdtune/io.hpp"

namespace pdtune::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitSchema = 2;

struct FieldError {
    std::string field;
    std::string message;
};

/// Runs one config document and writes <command>.json (and <command>.csv
/// where the command has tabular output) into out_dir. Failures are reported
/// as a JSON document on `err` and, when possible, as out_dir/error.json.
int run(const json& config, const std::filesystem::path& out_dir, std::ostream& err);

/// Reads the config from a file first; a missing or malformed file is a
/// schema failure.
int run_file(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& err);

}  // namespace pdtune::cli
