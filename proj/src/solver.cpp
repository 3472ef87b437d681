#include "simcache/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace simcache {

Eigen::ArrayXd entry_rates(const Eigen::Ref<const Eigen::ArrayXd>& occupancy,
                           const NeighborIndex& index, const QModel& q,
                           const Eigen::Ref<const Eigen::ArrayXd>& rates) {
  const ItemId n_items = index.size();
  Eigen::ArrayXd entry(n_items);
  for (ItemId n = 0; n < n_items; ++n) {
    // Walk list(n) in neighborhood order. prefix holds the probability that
    // no strictly-closer neighbor is cached; n itself never enters the
    // products (the candidate sets condition on n being absent).
    double prefix = 1.0;
    double miss_via_neighbor = 0.0;
    for (const Neighbor& nb : index.list(n)) {
      if (nb.item == n) continue;
      miss_via_neighbor +=
          (1.0 - q(nb.distance)) * occupancy[nb.item] * prefix;
      prefix *= 1.0 - occupancy[nb.item];
    }
    entry[n] = rates[n] * (prefix + miss_via_neighbor);
  }
  return entry;
}

Eigen::ArrayXd refresh_rates(const Eigen::Ref<const Eigen::ArrayXd>& occupancy,
                             const NeighborIndex& index, const QModel& q,
                             const Eigen::Ref<const Eigen::ArrayXd>& rates) {
  const ItemId n_items = index.size();
  Eigen::ArrayXd refresh = Eigen::ArrayXd::Zero(n_items);
  // Scatter pass: requests for i refresh the cached item n that is the
  // closest cached to i. Walking list(i) in order, prefix is the probability
  // that nothing closer to i than the current entry is cached; the self
  // entry contributes each item's own rate.
  for (ItemId i = 0; i < n_items; ++i) {
    double prefix = 1.0;
    for (const Neighbor& nb : index.list(i)) {
      refresh[nb.item] += rates[i] * q(nb.distance) * prefix;
      prefix *= 1.0 - occupancy[nb.item];
    }
  }
  return refresh;
}

Eigen::ArrayXd occupancies(const Eigen::Ref<const Eigen::ArrayXd>& entry,
                           const Eigen::Ref<const Eigen::ArrayXd>& refresh,
                           double t_c) {
  if (!(t_c > 0.0)) throw std::invalid_argument("t_c must be > 0");
  const Eigen::Index n = entry.size();
  Eigen::ArrayXd o(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double le = entry[k];
    const double lr = refresh[k];
    if (le <= 0.0) {
      o[k] = 0.0;
      continue;
    }
    // o = 1 / (1 + 1 / (le * E)); written against overflow of E itself.
    double le_times_e;
    if (lr <= 0.0) {
      le_times_e = le * t_c;  // continuous limit of expm1(x)/x -> t_c
    } else {
      const double x = std::min(lr * t_c, 700.0);
      le_times_e = std::expm1(x) / lr * le;
    }
    if (std::isinf(le_times_e)) {
      o[k] = 1.0;
    } else {
      o[k] = 1.0 / (1.0 + 1.0 / le_times_e);
    }
  }
  return o;
}

double solve_tc(const Eigen::Ref<const Eigen::ArrayXd>& entry,
                const Eigen::Ref<const Eigen::ArrayXd>& refresh,
                double target_sum) {
  const Eigen::Index reachable = (entry > 0.0).count();
  if (!(target_sum > 0.0))
    throw std::domain_error("occupancy target must be > 0");
  if (!(target_sum < static_cast<double>(reachable)))
    throw std::domain_error(
        "occupancy target is infeasible: it must be below the number of "
        "items with a positive entry rate");

  auto total = [&](double t) { return occupancies(entry, refresh, t).sum(); };
  const double tol = 1e-9 * std::max(target_sum, 1.0);

  double lo = 0.0;  // sum(0+) = 0 < target
  double hi = 1.0;
  while (total(hi) < target_sum) {
    hi *= 2.0;
    if (hi > 1e300) throw std::domain_error("characteristic time diverged");
  }

  double mid = hi;
  for (int iter = 0; iter < 400; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f = total(mid) - target_sum;
    if (std::abs(f) <= tol) break;
    if (f < 0.0) lo = mid; else hi = mid;
    if (hi - lo <= 1e-15 * mid) break;
  }
  return mid;
}

Eigen::ArrayXd hit_probs(const Eigen::Ref<const Eigen::ArrayXd>& occupancy,
                         const NeighborIndex& index, const QModel& q) {
  const ItemId n_items = index.size();
  Eigen::ArrayXd h(n_items);
  for (ItemId n = 0; n < n_items; ++n) {
    double prefix = 1.0;  // over neighbors of n seen so far, excluding n
    double acc = 0.0;
    for (const Neighbor& nb : index.list(n)) {
      if (nb.item == n) {
        acc += occupancy[n];  // q(0) = 1, empty closer set
        continue;
      }
      acc += q(nb.distance) * occupancy[nb.item] * prefix;
      prefix *= 1.0 - occupancy[nb.item];
    }
    h[n] = acc;
  }
  return h;
}

SolverResult fixed_point(const NeighborIndex& index, const QModel& q,
                         const Eigen::Ref<const Eigen::ArrayXd>& rates,
                         int capacity, const FixedPointOptions& options) {
  const ItemId n_items = index.size();
  if (capacity < 1 || capacity >= n_items)
    throw std::domain_error("capacity must satisfy 1 <= C < N");
  if (!(options.epsilon > 0.0))
    throw std::invalid_argument("epsilon must be > 0");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw std::invalid_argument("damping must be in (0, 1]");
  if (rates.size() != n_items)
    throw std::invalid_argument("rate vector size mismatch");

  const double target = static_cast<double>(capacity);

  SolverResult res;
  // LRU starting point: entry = refresh = lambda reduces the occupancy
  // formula to 1 - exp(-lambda * t).
  double t_c = solve_tc(rates, rates, target);
  Eigen::ArrayXd o = 1.0 - (-rates * t_c).exp();
  Eigen::ArrayXd h = hit_probs(o, index, q);
  res.trace.push_back(
      IterationStats{0, t_c, (rates * h).sum(), 0.0, std::abs(o.sum() - target)});
  res.entry_rate = rates;
  res.refresh_rate = rates;

  for (int j = 1; j <= options.max_iterations; ++j) {
    const Eigen::ArrayXd entry = entry_rates(o, index, q, rates);
    const Eigen::ArrayXd refresh = refresh_rates(o, index, q, rates);
    t_c = solve_tc(entry, refresh, target);
    const Eigen::ArrayXd o_new = occupancies(entry, refresh, t_c);
    const double capacity_gap = std::abs(o_new.sum() - target);

    const Eigen::ArrayXd o_damped =
        options.damping * o_new + (1.0 - options.damping) * o;
    const double max_delta = (o_damped - o).abs().maxCoeff();
    o = o_damped;
    h = hit_probs(o, index, q);

    res.trace.push_back(
        IterationStats{j, t_c, (rates * h).sum(), max_delta, capacity_gap});
    res.iterations = j;
    res.entry_rate = entry;
    res.refresh_rate = refresh;
    if (max_delta <= options.epsilon) {
      res.converged = true;
      break;
    }
  }

  res.occupancy = std::move(o);
  res.hit_prob = std::move(h);
  res.t_c = t_c;
  res.hit_rate = res.trace.back().hit_rate;
  res.overshoot_count = static_cast<int>((res.hit_prob > 1.0).count());
  return res;
}

}  // namespace simcache
