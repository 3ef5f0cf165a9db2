#pragma once

// Command-line front end: `qtkz render|lint|convert`.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qtkz {

/// Exit statuses.
enum ExitStatus : int {
    kExitOk = 0,
    kExitError = 1,  // parse, resolve or usage error
    kExitLint = 2,   // lints found (lint, or render --strict)
    kExitIo = 3,
};

enum class OutputFormat { Svg, Json };

struct RunConfig {
    std::vector<std::filesystem::path> inputs;  // empty or "-" means stdin
    std::optional<std::filesystem::path> output;
    OutputFormat format = OutputFormat::Svg;
    double scale = 1.0;
    std::optional<std::filesystem::path> styles;
    bool lint_as_errors = false;
    unsigned jobs = 0;  // 0: one per hardware thread
};

/// Fields present in a `.qtkzrc.json` object are copied over `config`.
/// Unknown keys are returned. Throws std::runtime_error on malformed input.
std::vector<std::string> apply_config_json(const std::string &json_text, RunConfig &config);

/// Writes `data` to a temporary file beside `path` and renames it over
/// `path`. Returns false on failure.
bool write_atomic(const std::filesystem::path &path, const std::string &data);

/// Runs one command line. `argv[0]` is the program name.
int run_cli(int argc, const char *const *argv, std::istream &in, std::ostream &out, std::ostream &err);

}  // namespace qtkz
