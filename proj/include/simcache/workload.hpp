#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "simcache/catalog.hpp"

namespace simcache {

struct GridPoint {
  int x = 0;
  int y = 0;
};

/// Per-item request probabilities (sums to 1) plus a provenance note.
struct PopularityProfile {
  Eigen::ArrayXd probabilities;
  std::string provenance;
};

/// An IRM request sequence. Identical (probabilities, length, seed) always
/// reproduce the identical sequence; replayed streams carry the items
/// explicitly. Sampling is inverse-CDF over the cumulative array with draws
/// from mt19937_64 mapped to [0, 1) by (x >> 11) * 2^-53.
class RequestStream {
 public:
  RequestStream(const PopularityProfile& profile, std::int64_t length,
                std::uint64_t seed);

  static RequestStream replay(std::vector<ItemId> items);

  std::int64_t length() const { return length_; }
  std::uint64_t seed() const { return seed_; }

  /// Materializes the sequence (generates or returns the replayed items).
  std::vector<ItemId> items() const;

 private:
  RequestStream() = default;

  std::uint64_t seed_ = 0;
  std::int64_t length_ = 0;
  Eigen::ArrayXd cumulative_;
  std::vector<ItemId> replayed_;
  bool is_replay_ = false;
};

/// Grid popularity with distance-decay around hotspot centers:
/// p(x, y) proportional to (min_c dis((x, y), c) + 1)^(-alpha).
PopularityProfile synth_grid_popularity(int width, int height,
                                        const std::vector<GridPoint>& hotspots,
                                        double alpha);

/// Empirical probabilities from per-item request counts. Items without a
/// count get probability 0; unknown ids and all-zero counts are rejected.
PopularityProfile ingest_trace(const Catalog& catalog,
                               const std::vector<std::pair<ItemId, std::int64_t>>& counts);

/// r i.i.d. draws from the profile, reproducible from the seed.
RequestStream gen_requests(const PopularityProfile& profile, std::int64_t r,
                           std::uint64_t seed);

}  // namespace simcache
