/// @file experiment.hpp
/// @brief Experiment configuration and the four CLI commands.
///
/// A config is one JSON document:
/// @code{.json}
/// {
///   "initial_data": {"kind": "demo_sine"},
///   "grid":   {"x_min": 0, "x_max": 1, "n_cells": 512},
///   "solver": {"epsilon": 0.01, "c0": 1, "t_end": 1, "boundary": "periodic",
///              "scheme": "coupled_conservative", "output_every": 100},
///   "sweep":  {"epsilon": [0.04, 0.02, 0.01]},
///   "audits": [{"pair": "special", "phi": "battery"}],
///   "output_dir": "out/demo",
///   "seed": 12345
/// }
/// @endcode
/// Unknown keys are rejected; every error names its JSON pointer.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carroll/solver.hpp"

namespace carroll::experiment {

using json = nlohmann::json;

enum class InitialKind { demo_sine, constant, riemann_jump, custom_csv };

struct InitialData {
    InitialKind kind = InitialKind::demo_sine;
    Vec2 value{2.0, 0.0};     ///< constant: (sigma, beta)
    Vec2 left{}, right{};     ///< riemann_jump states
    double x0 = 0.5;          ///< riemann_jump location
    std::filesystem::path path;  ///< custom_csv
};

struct AuditSpec {
    std::string pair;
    std::string phi;  ///< "battery" or one battery id such as "bump_w0.2_c0.5"
};

struct ExperimentConfig {
    InitialData initial;
    Grid1D grid;
    SolverConfig solver;
    bool c0_given = false;
    bool boundary_given = false;
    bool ri_form_given = false;
    std::vector<double> sweep_epsilon;
    std::vector<double> sweep_dx;
    double snapshot_spacing = 1e-3;  ///< target time between stored snapshots in sweeps
    std::vector<AuditSpec> audits;
    int histogram_bins = 64;
    std::filesystem::path output_dir = "out";
    unsigned seed = 12345;
};

/// Throws ConfigError "config error at /pointer: ..." on any schema violation.
/// Relative custom_csv paths resolve against `base_dir`.
ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Initial state on `grid`; riemann_jump data is mollified with a tanh profile of width 3 dx.
FluidState initial_state(const ExperimentConfig& cfg, const Grid1D& grid);

/// Solver settings for a concrete initial state: c0 defaults to min(sigma0 - |beta0|).
/// Throws InvariantViolation when the data fail the admissibility gate.
SolverConfig resolve_solver(const ExperimentConfig& cfg, const FluidState& s0);

struct CommandOptions {
    std::optional<std::filesystem::path> output_dir;
    int threads = 0;  ///< 0 keeps the OpenMP default
    std::optional<unsigned> seed;
};

/// Each command writes its artifacts under the output directory and returns 0;
/// failures are thrown as carroll::Error subclasses.
int cmd_run(ExperimentConfig cfg, const CommandOptions& opts);
int cmd_sweep_eps(ExperimentConfig cfg, const CommandOptions& opts);
int cmd_entropy_audit(ExperimentConfig cfg, const CommandOptions& opts);
int cmd_oracle_compare(ExperimentConfig cfg, const CommandOptions& opts);

/// 2 for invariant, domain and numerical failures, 3 for configuration and
/// input errors, 1 for anything unexpected.
int exit_code_for(const std::exception& e);

/// Single-line JSON error record.
std::string error_line(const std::exception& e);

/// Loads the config, applies options, runs `command`, reports errors on `err`.
int dispatch(const std::string& command, const std::filesystem::path& config_path,
             const CommandOptions& opts, std::ostream& err);

}  // namespace carroll::experiment
