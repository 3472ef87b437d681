#include "simcache/oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace simcache {

namespace {

using State = std::vector<ItemId>;  // recency order, front = most recent

State after_hit(const State& s, ItemId served) {
  State t;
  t.reserve(s.size());
  t.push_back(served);
  for (ItemId m : s)
    if (m != served) t.push_back(m);
  return t;
}

State after_miss(const State& s, ItemId n, int capacity) {
  State t;
  t.reserve(s.size() + 1);
  t.push_back(n);
  for (ItemId m : s) t.push_back(m);
  if (static_cast<int>(t.size()) > capacity) t.pop_back();
  return t;
}

// Closest cached item to n under the neighborhood order, or -1.
ItemId closest_cached(const NeighborIndex& index, const State& s, ItemId n,
                      double* dist) {
  for (const Neighbor& nb : index.list(n))
    if (std::find(s.begin(), s.end(), nb.item) != s.end()) {
      *dist = nb.distance;
      return nb.item;
    }
  return -1;
}

struct Branch {
  State to;
  double prob;  // jump probability, includes the request rate
  bool hit;
  ItemId requested;
};

}  // namespace

OracleResult exact_hit_rate(Policy policy, const NeighborIndex& index,
                            const QModel& q,
                            const Eigen::Ref<const Eigen::ArrayXd>& rates,
                            int capacity, std::size_t max_states) {
  const ItemId n_items = index.size();
  if (capacity < 1) throw std::domain_error("capacity must be >= 1");
  if (rates.size() != n_items)
    throw std::invalid_argument("rate vector size mismatch");

  // Reachable-state enumeration from the empty cache. A std::map keyed by
  // the state vector keeps everything in lexicographic order, which fixes
  // the matrix layout deterministically.
  std::map<State, std::vector<Branch>> transitions;
  auto discovered = [&](const State& s) { return transitions.count(s) > 0; };

  transitions[State{}];
  std::vector<State> frontier{State{}};
  while (!frontier.empty()) {
    std::vector<State> next_frontier;
    for (const State& s : frontier) {
      std::vector<Branch> out;
      for (ItemId n = 0; n < n_items; ++n) {
        const double lam = rates[n];
        if (lam <= 0.0) continue;
        double dist = 0.0;
        ItemId served = -1;
        if (policy == Policy::lru) {
          if (std::find(s.begin(), s.end(), n) != s.end()) served = n;
        } else {
          served = closest_cached(index, s, n, &dist);
        }

        if (served < 0) {
          out.push_back(Branch{after_miss(s, n, capacity), lam, false, n});
        } else if (policy == Policy::rnd_lru) {
          const double prob = q(dist);
          if (prob > 0.0)
            out.push_back(Branch{after_hit(s, served), lam * prob, true, n});
          if (prob < 1.0)
            out.push_back(
                Branch{after_miss(s, n, capacity), lam * (1.0 - prob), false, n});
        } else {
          out.push_back(Branch{after_hit(s, served), lam, true, n});
        }
      }
      for (const Branch& b : out)
        if (!discovered(b.to)) {
          if (transitions.size() >= max_states)
            throw std::domain_error("oracle state space exceeds the cap");
          transitions[b.to];
          next_frontier.push_back(b.to);
        }
      transitions[s] = std::move(out);
    }
    frontier = std::move(next_frontier);
  }

  const std::size_t n_states = transitions.size();
  std::map<State, int> state_id;
  {
    int k = 0;
    for (const auto& [s, out] : transitions) state_id[s] = k++;
  }

  struct Edge {
    int to;
    double prob;
  };
  std::vector<std::vector<Edge>> edges(n_states);
  std::vector<double> self_residual(n_states, 0.0);
  for (const auto& [s, out] : transitions) {
    const int from = state_id[s];
    double total = 0.0;
    for (const Branch& b : out) {
      edges[from].push_back(Edge{state_id[b.to], b.prob});
      total += b.prob;
    }
    self_residual[from] = 1.0 - total;  // floating slack only; keeps rows stochastic
  }

  // Power iteration from the empty-cache state.
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(n_states);
  pi[state_id[State{}]] = 1.0;
  auto step = [&](const Eigen::VectorXd& cur) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n_states);
    for (std::size_t from = 0; from < n_states; ++from) {
      const double mass = cur[from];
      if (mass == 0.0) continue;
      for (const Edge& e : edges[from]) next[e.to] += e.prob * mass;
      next[from] += self_residual[from] * mass;
    }
    return next;
  };

  constexpr double tol = 1e-12;
  double residual = 1.0;
  for (long iter = 0; iter < 2000000 && residual > tol; ++iter) {
    Eigen::VectorXd next = step(pi);
    residual = (next - pi).lpNorm<Eigen::Infinity>();
    pi = std::move(next);
  }

  OracleResult res;
  res.state_count = n_states;
  res.residual = (step(pi) - pi).lpNorm<Eigen::Infinity>();
  res.hit_prob = Eigen::ArrayXd::Zero(n_items);
  res.occupancy = Eigen::ArrayXd::Zero(n_items);
  double hit_rate = 0.0;
  for (const auto& [s, out] : transitions) {
    const double mass = pi[state_id[s]];
    if (mass == 0.0) continue;
    for (ItemId m : s) res.occupancy[m] += mass;
    for (const Branch& b : out)
      if (b.hit) {
        res.hit_prob[b.requested] += mass * b.prob;
        hit_rate += mass * b.prob;
      }
  }
  // hit_prob held lambda_n * P(hit | request n) up to here.
  for (ItemId n = 0; n < n_items; ++n)
    if (rates[n] > 0.0) res.hit_prob[n] /= rates[n];
  res.hit_rate = hit_rate;
  return res;
}

}  // namespace simcache
