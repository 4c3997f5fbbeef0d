/// @file io.hpp
/// @brief CSV and JSON serialisation of states, histograms, step reports and audits.
///
/// Every writer goes through write_atomic, so an interrupted run never leaves a
/// partially written file under the final name.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "carroll/analysis.hpp"
#include "carroll/phase.hpp"
#include "carroll/solver.hpp"

namespace carroll::io {

using json = nlohmann::json;

/// Writes to `<path>.tmp.<pid>` and renames over `path`. Creates parent directories.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Header `x,sigma,beta`, one row per cell, 17 significant digits.
std::string state_csv(const FluidState& s);
/// Parses a state CSV onto `grid`; x must match the cell centres to 1e-9 of the length.
FluidState parse_state_csv(const std::string& text, const Grid1D& grid);
FluidState read_state_csv(const std::filesystem::path& path, const Grid1D& grid);

/// {grid:{x_min,x_max,n_cells}, t, sigma:[...], beta:[...]}
json state_json(const FluidState& s);
FluidState state_from_json(const json& j);

/// Header `s_lo,s_hi,mu1,mu2`.
std::string histogram_csv(const KineticMeasureHistogram& h);

/// Header `t,dt,min_w1,min_w2,l2_energy,visc_dissipation_cum`.
std::string reports_csv(const std::vector<StepReport>& reports);

json config_json(const SolverConfig& cfg);

/// {config, steps, min_w1_overall, min_w2_overall, sup_l2_energy, cum_dissipation, wallclock_s}
json run_summary_json(const Trajectory& traj, bool include_timing = true);

/// {audit, inputs, value, threshold, pass}
json audit_json(const std::string& audit, const json& inputs, double value, double threshold,
                bool pass);

/// Pretty-printed with a trailing newline.
std::string dump(const json& j);

std::string format_double(double v);

}  // namespace carroll::io
