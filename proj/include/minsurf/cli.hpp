#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "minsurf/angel.hpp"

namespace minsurf::cli {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kSuccess = 0, kConfigError = 1, kNoConvergence = 2, kVerifyFailure = 3, kPeriodLeak = 4 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int genus = 1;
    double solve_tol = 1e-10;
    double period_tol = 1e-7;
    double quad_tol = 1e-13;
    int mesh_density = 96;
    std::optional<double> r_min;
    std::optional<double> r_max;
    std::string out_dir = ".";
    std::string report_path;    // default <out>/report-<command>.json
    std::string seed_path;      // solution file of a lower genus to continue from
    std::string solution_path;  // input of verify and mesh
    bool write_ply = false;

    // Throws ConfigError.
    void validate() const;
};

// Flat "key = value" text with '#' comments. Keys: genus, solve_tol,
// period_tol, quad_tol, mesh_density, r_min, r_max, out, report, seed,
// solution, ply. Throws ConfigError.
RunConfig read_config_file(const std::string& path, RunConfig base = {});

json solution_to_json(const angel::SolveResult& r);
// Throws ConfigError on missing or malformed fields.
angel::SolveResult solution_from_json(const json& j);
angel::SolveResult read_solution(const std::string& path);

struct Outcome {
    int exit_code = kSuccess;
    std::string report_path;
    json report;
};

// Each command writes its report (and solution or mesh files) and never throws
// for expected failures; the exit code carries the status.
Outcome cmd_solve(const RunConfig& config);
Outcome cmd_verify(const RunConfig& config);
Outcome cmd_mesh(const RunConfig& config);

// Command-line entry: parses flags over an optional --config file, runs the
// subcommand, prints the report path on stdout and returns the exit code.
int run(int argc, char** argv);

}  // namespace minsurf::cli
