#pragma once

#include <cstddef>
#include <vector>

#include "cpm/config.hpp"

namespace cpm {

// Experiment drivers behind the CLI verbs. Each writes its files under
// cfg.output_dir; failures throw ConfigError or SolverError.

// Single evolution: snapshot CSVs, event log, manifest with per-snapshot
// conservation and total-variation diagnostics.
void cmd_run(const RunConfig& cfg);

// Sampling only: the t=0 particle set and its interpolation error.
void cmd_sample(const RunConfig& cfg);

// Error-vs-resolution study over both sampling modes against a fine particle
// reference; writes convergence.csv and least-squares orders.
void cmd_converge(const RunConfig& cfg, const std::vector<std::size_t>& resolutions);

// Particle method vs the finite-volume oracle at matched resolutions against
// a fine finite-volume reference. oracle_self replaces the particle column
// with the oracle itself (a zero-error sanity check).
void cmd_compare(const RunConfig& cfg, const std::vector<std::size_t>& resolutions,
                 bool oracle_self = false);

// Worker count for resolution sweeps: CPM_WORKERS when set, otherwise the
// hardware concurrency, never more than the job count.
std::size_t sweep_workers(std::size_t jobs);

}  // namespace cpm
