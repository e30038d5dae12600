#pragma once

#include "reduxion/cascade.hpp"
#include "reduxion/error.hpp"
#include "reduxion/scenarios.hpp"
#include "reduxion/verify.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reduxion {

enum class RunMode { Trajectory, Ensemble, Enumerate, EntropyScan, Verify };
enum class OutputFormat { Json, Csv };

struct ScanSpec {
    std::optional<double> t_max; // default: the first stage's solver horizon
    int points = 201;
    std::vector<double> times; // explicit sample times override t_max / points
};

struct RunConfig {
    std::string scenario;
    ParamBlock params;
    RunMode mode = RunMode::Enumerate;
    std::size_t n_traj = 1000;
    std::uint64_t seed = 0;
    std::optional<double> horizon; // overrides every stage's solver window
    SolverConfig solver;
    OptConfig mixing;
    ScanSpec scan;
    std::string output_path; // empty: stdout
    OutputFormat format = OutputFormat::Json;
    std::string filter; // verify mode
};

// Parses and validates a config document. Throws ConfigInvalid.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// The configured scenario with solver and horizon overrides applied.
Scenario configured_scenario(const RunConfig& cfg);

struct RunResult {
    std::string text;
    int exit_code = 0;
};

// Runs the configured mode and renders its output.
RunResult execute(const RunConfig& cfg);

std::string render_verify(const std::vector<VerifyRow>& rows, OutputFormat format);

// Process exit code for an engine error: 2 invalid input, 3 NonConvergent, 4 StageOverflow.
int exit_code_for(ErrorKind kind);

} // namespace reduxion
