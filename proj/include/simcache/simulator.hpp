#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "simcache/catalog.hpp"
#include "simcache/workload.hpp"

namespace simcache {

enum class Policy { lru, sim_lru, rnd_lru };

const char* policy_name(Policy p);

struct SimOptions {
  double warmup_fraction = 0.0;  // fraction of the stream excluded from stats
  std::uint64_t seed = 0;        // Bernoulli draws; independent of the stream
  bool check_d_separation = false;
};

/// Counters from one simulation run. Hit and presence counters cover only
/// the post-warm-up window; presence is sampled at each request epoch before
/// the request is applied.
struct SimResult {
  Policy policy;
  int capacity = 0;
  std::int64_t requests = 0;
  std::int64_t warmup = 0;
  std::int64_t hits = 0;
  double hit_rate = 0.0;                  // hits / (requests - warmup)
  std::vector<std::int64_t> item_hits;    // by requested item
  std::vector<std::int64_t> item_presence;
  Eigen::ArrayXd occupancy;               // presence / (requests - warmup)
  std::int64_t d_separation_violations = 0;  // only if check_d_separation
};

/// Runs one trace-driven simulation. For each request n the cached item
/// minimizing the neighborhood order serves it per the policy:
///   lru      exact match only;
///   sim-lru  any cached item within d serves and is refreshed;
///   rnd-lru  the closest cached item within d serves with probability
///            q(dis), otherwise the request misses and n is inserted.
/// A miss inserts n at the front and evicts the back when over capacity.
SimResult simulate(Policy policy, const NeighborIndex& index, const QModel& q,
                   int capacity, const RequestStream& stream,
                   const SimOptions& options = {});

struct ReplicationSummary {
  int replications = 0;
  double mean_hit_rate = 0.0;
  std::optional<double> ci_half_width;  // 1.96 * sd / sqrt(k); k >= 2 only
  Eigen::ArrayXd mean_occupancy;
};

/// Mean hit rate, normal 95% confidence half-width, and mean occupancies
/// over replications that differ only in seeds. Mixed configurations are
/// rejected.
ReplicationSummary aggregate_replications(const std::vector<SimResult>& results);

}  // namespace simcache
