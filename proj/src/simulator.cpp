#include "simcache/simulator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace simcache {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::lru: return "lru";
    case Policy::sim_lru: return "sim-lru";
    case Policy::rnd_lru: return "rnd-lru";
  }
  return "?";
}

namespace {

// Intrusive recency list over item ids: front = most recent. O(1) insert,
// remove, move-to-front, evict-back.
class RecencyList {
 public:
  explicit RecencyList(ItemId n_items)
      : next_(n_items, -1), prev_(n_items, -1), cached_(n_items, 0) {}

  bool cached(ItemId n) const { return cached_[n] != 0; }
  int size() const { return size_; }
  ItemId back() const { return tail_; }

  void push_front(ItemId n) {
    cached_[n] = 1;
    prev_[n] = -1;
    next_[n] = head_;
    if (head_ >= 0) prev_[head_] = n;
    head_ = n;
    if (tail_ < 0) tail_ = n;
    ++size_;
  }

  void remove(ItemId n) {
    cached_[n] = 0;
    if (prev_[n] >= 0) next_[prev_[n]] = next_[n]; else head_ = next_[n];
    if (next_[n] >= 0) prev_[next_[n]] = prev_[n]; else tail_ = prev_[n];
    --size_;
  }

  void move_to_front(ItemId n) {
    if (head_ == n) return;
    remove(n);
    push_front(n);
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (ItemId n = head_; n >= 0; n = next_[n]) fn(n);
  }

 private:
  std::vector<ItemId> next_, prev_;
  std::vector<char> cached_;
  ItemId head_ = -1, tail_ = -1;
  int size_ = 0;
};

}  // namespace

SimResult simulate(Policy policy, const NeighborIndex& index, const QModel& q,
                   int capacity, const RequestStream& stream,
                   const SimOptions& options) {
  if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  if (!(options.warmup_fraction >= 0.0 && options.warmup_fraction < 1.0))
    throw std::invalid_argument("warmup fraction must be in [0, 1)");

  const ItemId n_items = index.size();
  const std::vector<ItemId> requests = stream.items();
  const std::int64_t r = static_cast<std::int64_t>(requests.size());
  const std::int64_t warmup =
      static_cast<std::int64_t>(options.warmup_fraction * static_cast<double>(r));
  const std::int64_t measured = r - warmup;

  RecencyList cache(n_items);
  std::mt19937_64 rng(options.seed);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  SimResult res;
  res.policy = policy;
  res.capacity = capacity;
  res.requests = r;
  res.warmup = warmup;
  res.item_hits.assign(n_items, 0);
  res.item_presence.assign(n_items, 0);

  // Residence bookkeeping: an item inserted while applying request t is
  // present at measurement epochs t+1 .. t_evict (membership is sampled
  // before the request is applied, so the eviction epoch still counts).
  std::vector<std::int64_t> entered(n_items, 0);
  auto close_residence = [&](ItemId n, std::int64_t last_epoch) {
    const std::int64_t lo = std::max(entered[n], warmup);
    const std::int64_t hi = std::min(last_epoch, r - 1);
    if (hi >= lo) res.item_presence[n] += hi - lo + 1;
  };

  auto check_separation = [&](ItemId inserted) {
    for (const Neighbor& nb : index.list(inserted))
      if (nb.item != inserted && cache.cached(nb.item))
        ++res.d_separation_violations;
  };
  auto full_separation_sweep = [&]() {
    cache.for_each([&](ItemId m) {
      for (const Neighbor& nb : index.list(m))
        if (nb.item != m && cache.cached(nb.item))
          ++res.d_separation_violations;
    });
  };

  for (std::int64_t t = 0; t < r; ++t) {
    const ItemId n = requests[t];

    ItemId served = -1;
    bool hit = false;
    if (policy == Policy::lru) {
      if (cache.cached(n)) {
        served = n;
        hit = true;
      }
    } else {
      // Lists are sorted by the neighborhood order, so the first cached
      // entry is the closest cached item within d.
      const std::vector<Neighbor>& list = index.list(n);
      double dist = 0.0;
      for (const Neighbor& nb : list)
        if (cache.cached(nb.item)) {
          served = nb.item;
          dist = nb.distance;
          break;
        }
      if (served >= 0) {
        if (policy == Policy::sim_lru) {
          hit = true;
        } else {
          const double prob = q(dist);
          hit = prob >= 1.0 || (prob > 0.0 && uniform() < prob);
        }
      }
    }

    if (hit) {
      cache.move_to_front(served);
      if (t >= warmup) {
        ++res.hits;
        ++res.item_hits[n];
      }
    } else {
      cache.push_front(n);
      if (cache.size() > capacity) {
        const ItemId victim = cache.back();
        close_residence(victim, t);
        cache.remove(victim);
      }
      entered[n] = t + 1;
      if (options.check_d_separation && policy == Policy::sim_lru)
        check_separation(n);
    }

    if (options.check_d_separation && policy == Policy::sim_lru &&
        (t & 0xffff) == 0xffff)
      full_separation_sweep();
  }

  cache.for_each([&](ItemId m) { close_residence(m, r - 1); });
  if (options.check_d_separation && policy == Policy::sim_lru)
    full_separation_sweep();

  res.hit_rate = measured > 0 ? static_cast<double>(res.hits) /
                                    static_cast<double>(measured)
                              : 0.0;
  res.occupancy.resize(n_items);
  for (ItemId m = 0; m < n_items; ++m)
    res.occupancy[m] = measured > 0
                           ? static_cast<double>(res.item_presence[m]) /
                                 static_cast<double>(measured)
                           : 0.0;
  return res;
}

ReplicationSummary aggregate_replications(
    const std::vector<SimResult>& results) {
  if (results.empty()) throw std::invalid_argument("no replications");
  const SimResult& first = results.front();
  for (const SimResult& r : results) {
    const bool same = r.policy == first.policy &&
                      r.capacity == first.capacity &&
                      r.requests == first.requests &&
                      r.warmup == first.warmup &&
                      r.occupancy.size() == first.occupancy.size();
    if (!same)
      throw std::invalid_argument("replications have mixed configurations");
  }

  ReplicationSummary out;
  out.replications = static_cast<int>(results.size());
  double sum = 0.0;
  out.mean_occupancy = Eigen::ArrayXd::Zero(first.occupancy.size());
  for (const SimResult& r : results) {
    sum += r.hit_rate;
    out.mean_occupancy += r.occupancy;
  }
  out.mean_hit_rate = sum / out.replications;
  out.mean_occupancy /= out.replications;

  if (out.replications >= 2) {
    double ss = 0.0;
    for (const SimResult& r : results) {
      const double d = r.hit_rate - out.mean_hit_rate;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (out.replications - 1));
    out.ci_half_width = 1.96 * sd / std::sqrt(out.replications);
  }
  return out;
}

}  // namespace simcache
