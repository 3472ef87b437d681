#pragma once

#include <vector>

#include <Eigen/Core>

#include "simcache/catalog.hpp"

namespace simcache {

/// Rate at which each item enters the cache while absent: lambda_e_n =
/// lambda_n * p_e_n, where p_e_n is the probability that a request for n
/// misses given n is not cached. Treats per-item presence events as
/// independent given the occupancies. Isolated items get lambda_e = lambda.
Eigen::ArrayXd entry_rates(const Eigen::Ref<const Eigen::ArrayXd>& occupancy,
                           const NeighborIndex& index, const QModel& q,
                           const Eigen::Ref<const Eigen::ArrayXd>& rates);

/// Rate at which each cached item is moved to the recency front, by its own
/// requests plus neighbor requests it serves. Always >= the item's own rate.
Eigen::ArrayXd refresh_rates(const Eigen::Ref<const Eigen::ArrayXd>& occupancy,
                             const NeighborIndex& index, const QModel& q,
                             const Eigen::Ref<const Eigen::ArrayXd>& rates);

/// Renewal occupancy o_n = E_n / (1/lambda_e_n + E_n) with expected on-time
/// E_n = expm1(lambda_r_n * t_c) / lambda_r_n (E_n = t_c when lambda_r_n = 0,
/// its continuous limit). lambda_e_n = 0 gives o_n = 0. The exponent is
/// clamped at 700 to avoid overflow; the result stays in [0, 1] and is
/// nondecreasing in t_c.
Eigen::ArrayXd occupancies(const Eigen::Ref<const Eigen::ArrayXd>& entry,
                           const Eigen::Ref<const Eigen::ArrayXd>& refresh,
                           double t_c);

/// Characteristic time such that the occupancies sum to target_sum, found by
/// bracket doubling plus bisection on the monotone map t_c -> sum(o).
/// Requires 0 < target_sum < #{n : entry_n > 0}; throws std::domain_error
/// when the target is infeasible.
double solve_tc(const Eigen::Ref<const Eigen::ArrayXd>& entry,
                const Eigen::Ref<const Eigen::ArrayXd>& refresh,
                double target_sum);

/// Per-item approximate-hit probability h_n: the sum over candidates i in
/// N[n] of q_i(n) * o_i * prod over items closer than i of (1 - o). Computed
/// verbatim; values can exceed 1 and are not clamped.
Eigen::ArrayXd hit_probs(const Eigen::Ref<const Eigen::ArrayXd>& occupancy,
                         const NeighborIndex& index, const QModel& q);

struct FixedPointOptions {
  double epsilon = 1e-8;    // stop when max |o_j - o_{j-1}| <= epsilon
  int max_iterations = 100;
  double damping = 0.5;     // o_j = damping * f_o(...) + (1 - damping) * o_{j-1}
};

struct IterationStats {
  int iteration;
  double t_c;
  double hit_rate;
  double max_delta_o;
  double capacity_gap;  // |sum f_o - C| at the solved t_c, before damping
};

struct SolverResult {
  Eigen::ArrayXd occupancy;
  Eigen::ArrayXd hit_prob;
  Eigen::ArrayXd entry_rate;
  Eigen::ArrayXd refresh_rate;
  double t_c = 0.0;
  double hit_rate = 0.0;  // sum over items of rate * hit_prob
  bool converged = false;
  int iterations = 0;
  int overshoot_count = 0;  // items with final h_n > 1
  std::vector<IterationStats> trace;  // row 0 holds the LRU starting point
};

/// Damped fixed-point iteration: starting from the LRU occupancies at
/// t_c(0), alternately updates entry/refresh rates from the previous
/// occupancies, re-solves t_c for the capacity constraint, and damps the new
/// occupancy estimate. Non-convergence within max_iterations is reported via
/// the flag, not an error; an infeasible capacity throws std::domain_error.
SolverResult fixed_point(const NeighborIndex& index, const QModel& q,
                         const Eigen::Ref<const Eigen::ArrayXd>& rates,
                         int capacity, const FixedPointOptions& options = {});

}  // namespace simcache
