#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "simcache/catalog.hpp"
#include "simcache/simulator.hpp"

namespace simcache {

struct OracleResult {
  double hit_rate = 0.0;
  Eigen::ArrayXd hit_prob;   // per requested item
  Eigen::ArrayXd occupancy;  // stationary membership probability
  std::size_t state_count = 0;
  double residual = 0.0;  // max |pi P - pi| of the returned distribution
};

/// Exact steady-state hit rate for tiny instances: enumerates the reachable
/// recency-order cache states from the empty cache, builds the jump-chain
/// transition matrix, and power-iterates from the empty state until the
/// distribution is stationary to 1e-12 (the cold-start limiting behavior,
/// which is what a simulation measures even when the chain is reducible).
///
/// Throws std::domain_error if the reachable state space exceeds max_states.
OracleResult exact_hit_rate(Policy policy, const NeighborIndex& index,
                            const QModel& q,
                            const Eigen::Ref<const Eigen::ArrayXd>& rates,
                            int capacity, std::size_t max_states = 100000);

}  // namespace simcache
