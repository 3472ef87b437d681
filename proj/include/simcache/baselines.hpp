#pragma once

#include <vector>

#include <Eigen/Core>

#include "simcache/catalog.hpp"

namespace simcache {

struct TtlEstimate {
  double t_c = 0.0;
  Eigen::ArrayXd hit_prob;  // equals the occupancies for these estimators
  double hit_rate = 0.0;
};

/// Classic LRU TTL estimate: h_n = 1 - exp(-lambda_n * t_c) with the
/// occupancies summing to the capacity. Requires 1 <= C < |support(lambda)|.
TtlEstimate lru_ttl(const Eigen::Ref<const Eigen::ArrayXd>& rates,
                    int capacity);

/// LRU with aggregate requests: each item is charged the summed rate of its
/// whole neighborhood before applying the LRU TTL formulas. The reported
/// hit_rate still weights per-item hit probabilities by the original rates.
TtlEstimate lru_agg(const Eigen::Ref<const Eigen::ArrayXd>& rates,
                    const NeighborIndex& index, int capacity);

/// Maximum weighted coverage: pick at most `budget` sets maximizing the
/// total weight of covered elements.
struct CoverageInstance {
  Eigen::ArrayXd weights;
  std::vector<std::vector<ItemId>> sets;
  int budget = 0;
};

/// Instance of the optimal-static-allocation problem: element weights are
/// the request rates and the candidate sets are the closed neighborhoods.
CoverageInstance coverage_instance(const NeighborIndex& index,
                                   const Eigen::Ref<const Eigen::ArrayXd>& rates,
                                   int budget);

struct GreedyResult {
  std::vector<ItemId> selected;
  double covered_weight = 0.0;
};

/// Greedy maximum weighted coverage: repeatedly picks the set with the
/// largest residual covered weight (ties by lowest item id) and removes the
/// covered elements, stopping after `budget` picks or when no residual
/// weight is left. Guarantees a (1 - 1/e) fraction of the optimum.
GreedyResult greedy_coverage(const CoverageInstance& instance);

}  // namespace simcache
