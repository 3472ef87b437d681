#include "simcache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace simcache {

RequestStream::RequestStream(const PopularityProfile& profile,
                             std::int64_t length, std::uint64_t seed)
    : seed_(seed), length_(length) {
  if (length < 1) throw std::invalid_argument("stream length must be >= 1");
  const Eigen::ArrayXd& p = profile.probabilities;
  if (p.size() == 0) throw std::invalid_argument("empty profile");
  cumulative_.resize(p.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    cumulative_[i] = acc;
  }
  // Pin the top so a draw of u -> 1 cannot fall off the table.
  cumulative_[p.size() - 1] = 1.0;
}

RequestStream RequestStream::replay(std::vector<ItemId> items) {
  if (items.empty()) throw std::invalid_argument("empty replay stream");
  RequestStream s;
  s.length_ = static_cast<std::int64_t>(items.size());
  s.replayed_ = std::move(items);
  s.is_replay_ = true;
  return s;
}

std::vector<ItemId> RequestStream::items() const {
  if (is_replay_) return replayed_;
  std::vector<ItemId> out(static_cast<std::size_t>(length_));
  std::mt19937_64 rng(seed_);
  const double* cum = cumulative_.data();
  const ItemId n = static_cast<ItemId>(cumulative_.size());
  for (std::int64_t k = 0; k < length_; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double* pos = std::upper_bound(cum, cum + n, u);
    out[static_cast<std::size_t>(k)] =
        static_cast<ItemId>(std::min<std::ptrdiff_t>(pos - cum, n - 1));
  }
  return out;
}

PopularityProfile synth_grid_popularity(int width, int height,
                                        const std::vector<GridPoint>& hotspots,
                                        double alpha) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("grid dimensions must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (hotspots.empty()) throw std::invalid_argument("need >= 1 hotspot");
  for (const GridPoint& c : hotspots)
    if (c.x < 0 || c.x >= width || c.y < 0 || c.y >= height)
      throw std::invalid_argument("hotspot outside the grid");

  const std::int64_t n = static_cast<std::int64_t>(width) * height;
  Eigen::ArrayXd p(n);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double best_sq = std::numeric_limits<double>::infinity();
      for (const GridPoint& c : hotspots) {
        const double dx = x - c.x;
        const double dy = y - c.y;
        best_sq = std::min(best_sq, dx * dx + dy * dy);
      }
      p[static_cast<std::int64_t>(y) * width + x] =
          std::pow(std::sqrt(best_sq) + 1.0, -alpha);
    }
  p /= p.sum();
  return PopularityProfile{std::move(p), "synthetic-grid"};
}

PopularityProfile ingest_trace(
    const Catalog& catalog,
    const std::vector<std::pair<ItemId, std::int64_t>>& counts) {
  Eigen::ArrayXd p = Eigen::ArrayXd::Zero(catalog.size());
  std::int64_t total = 0;
  for (const auto& [id, count] : counts) {
    if (id < 0 || id >= catalog.size())
      throw std::invalid_argument("trace count references unknown item id");
    if (count < 0) throw std::invalid_argument("negative request count");
    p[id] += static_cast<double>(count);
    total += count;
  }
  if (total == 0) throw std::invalid_argument("all trace counts are zero");
  p /= static_cast<double>(total);
  return PopularityProfile{std::move(p), "trace-empirical"};
}

RequestStream gen_requests(const PopularityProfile& profile, std::int64_t r,
                           std::uint64_t seed) {
  return RequestStream(profile, r, seed);
}

}  // namespace simcache
