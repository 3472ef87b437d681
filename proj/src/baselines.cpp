#include "simcache/baselines.hpp"

#include <stdexcept>

#include "simcache/solver.hpp"

namespace simcache {

namespace {

TtlEstimate ttl_estimate(const Eigen::Ref<const Eigen::ArrayXd>& ttl_rates,
                         const Eigen::Ref<const Eigen::ArrayXd>& weight_rates,
                         int capacity) {
  if (capacity < 1) throw std::domain_error("capacity must be >= 1");
  // entry = refresh = rate reduces the renewal occupancy to 1 - e^(-rate t).
  TtlEstimate est;
  est.t_c = solve_tc(ttl_rates, ttl_rates, static_cast<double>(capacity));
  est.hit_prob = 1.0 - (-ttl_rates * est.t_c).exp();
  est.hit_rate = (weight_rates * est.hit_prob).sum();
  return est;
}

}  // namespace

TtlEstimate lru_ttl(const Eigen::Ref<const Eigen::ArrayXd>& rates,
                    int capacity) {
  return ttl_estimate(rates, rates, capacity);
}

TtlEstimate lru_agg(const Eigen::Ref<const Eigen::ArrayXd>& rates,
                    const NeighborIndex& index, int capacity) {
  const ItemId n_items = index.size();
  if (rates.size() != n_items)
    throw std::invalid_argument("rate vector size mismatch");
  Eigen::ArrayXd agg = Eigen::ArrayXd::Zero(n_items);
  for (ItemId n = 0; n < n_items; ++n)
    for (const Neighbor& nb : index.list(n)) agg[n] += rates[nb.item];
  return ttl_estimate(agg, rates, capacity);
}

CoverageInstance coverage_instance(
    const NeighborIndex& index, const Eigen::Ref<const Eigen::ArrayXd>& rates,
    int budget) {
  if (budget < 1) throw std::domain_error("budget must be >= 1");
  CoverageInstance inst;
  inst.weights = rates;
  inst.budget = budget;
  inst.sets.resize(index.size());
  for (ItemId n = 0; n < index.size(); ++n) {
    inst.sets[n].reserve(index.list(n).size());
    for (const Neighbor& nb : index.list(n)) inst.sets[n].push_back(nb.item);
  }
  return inst;
}

GreedyResult greedy_coverage(const CoverageInstance& instance) {
  const auto n_sets = static_cast<ItemId>(instance.sets.size());
  std::vector<char> covered(instance.weights.size(), 0);
  GreedyResult res;

  for (int pick = 0; pick < instance.budget; ++pick) {
    ItemId best = -1;
    double best_gain = 0.0;
    for (ItemId n = 0; n < n_sets; ++n) {
      double gain = 0.0;
      for (ItemId m : instance.sets[n])
        if (!covered[m]) gain += instance.weights[m];
      if (gain > best_gain) {
        best_gain = gain;
        best = n;
      }
    }
    if (best < 0) break;  // nothing left worth covering
    res.selected.push_back(best);
    res.covered_weight += best_gain;
    for (ItemId m : instance.sets[best]) covered[m] = 1;
  }
  return res;
}

}  // namespace simcache
