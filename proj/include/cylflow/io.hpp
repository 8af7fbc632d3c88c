#pragma once

#include <map>
#include <string>

#include "cylflow/flow.hpp"
#include "cylflow/scenario.hpp"

namespace cylflow {

// Shortest-exact decimal rendering used by every text output (17 significant
// digits round-trips a double).
std::string format_real(Real x);

// Write `content` atomically: temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& content);

// Trajectory table, one row per record. Column names are part of the output
// contract; c_est is the instantaneous area-mean of u_t at the record time.
// Header: t,E,sup_grad,sup_ut,c_est,max_w,max_phi,bc_residual
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// Structured grid dump: one node per line with indices, position, boundary
// data and any number of named fields (sorted by name for stable output).
std::string grid_dump(const DomainGeometry& geom,
                      const std::map<std::string, Vector>& fields);
void write_grid_dump(const std::string& path, const DomainGeometry& geom,
                     const std::map<std::string, Vector>& fields);

void write_json(const std::string& path, const Json& j);

// Create cfg.output.directory (under CYLFLOW_OUTPUT_ROOT if set, unless
// `override_dir` replaces it) and return the "<dir>/<prefix>" path stem.
std::string prepare_output(const ScenarioConfig& cfg, const std::string& override_dir);

}  // namespace cylflow
