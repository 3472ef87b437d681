#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "simcache/catalog.hpp"
#include "simcache/simulator.hpp"
#include "simcache/solver.hpp"
#include "simcache/workload.hpp"

namespace simcache {

/// One experiment description shared by the CLI subcommands.
struct ExperimentConfig {
  // Catalog source: a CSV file, or synthetic grid parameters.
  std::optional<std::filesystem::path> catalog_file;
  std::optional<GridShape> grid;
  std::vector<GridPoint> hotspots{{24, 24}, {74, 74}};
  double alpha = 2.5;

  double d = 1.0;
  std::optional<QModel> q;  // default: exact within d, or the rnd-lru map
  std::optional<TieBreak> tie_break;  // default: ccw for grids, id otherwise
  Policy policy = Policy::sim_lru;

  std::vector<int> capacities;  // strictly increasing
  std::int64_t requests = 200000;
  int replications = 10;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.0;
  FixedPointOptions solver;

  int workers = 0;  // 0 = hardware concurrency
  std::filesystem::path out_dir = ".";
};

/// "distance:probability,..." -> QModel steps.
QModel parse_q_map(const std::string& text);

Catalog build_catalog(const ExperimentConfig& config);
QModel resolve_q(const ExperimentConfig& config);
TieBreak resolve_tie_break(const ExperimentConfig& config);

/// Deterministic per-task seed derivation (splitmix64 over the mixed key).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t salt);

/// Runs tasks on a bounded pool; results must go to preassigned slots so the
/// outcome does not depend on the worker count.
void run_parallel(std::vector<std::function<void()>>& tasks, int workers);

/// Capacity sweep comparing the simulator against every estimator. Rows are
/// `capacity,method,hit_rate,ci_low,ci_high`; CI fields are empty for
/// analytic methods and infeasible capacities get an empty hit_rate.
std::string run_sweep_csv(const ExperimentConfig& config);

/// Per-item occupancies at one capacity:
/// `item_id,x,y,occupancy_sim,occupancy_solver`.
std::string run_occupancy_csv(const ExperimentConfig& config, int capacity);

/// Solver convergence trace at one capacity:
/// `iteration,t_c,hit_rate,max_delta_o`. Row 0 is the LRU starting point.
std::string run_trace_csv(const ExperimentConfig& config, int capacity);

/// Writes catalog.csv and popularity.csv for the configured grid.
void cmd_synth(const ExperimentConfig& config);
/// Writes sweep.csv.
void cmd_sweep(const ExperimentConfig& config);
/// Writes occupancy.csv.
void cmd_occupancy(const ExperimentConfig& config, int capacity);
/// Writes trace.csv.
void cmd_trace(const ExperimentConfig& config, int capacity);

}  // namespace simcache
