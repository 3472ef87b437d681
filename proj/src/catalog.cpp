#include "simcache/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simcache {

Catalog::Catalog(Eigen::MatrixXd embeddings, Eigen::ArrayXd weights,
                 std::optional<GridShape> grid)
    : embeddings_(std::move(embeddings)),
      rates_(std::move(weights)),
      grid_(grid) {
  if (embeddings_.rows() == 0) throw std::invalid_argument("catalog is empty");
  if (embeddings_.cols() < 1)
    throw std::invalid_argument("embedding dimension must be >= 1");
  if (rates_.size() != embeddings_.rows())
    throw std::invalid_argument("weight count does not match item count");
  if (!rates_.isFinite().all() || (rates_ < 0.0).any())
    throw std::invalid_argument("weights must be finite and nonnegative");
  const double total = rates_.sum();
  if (total <= 0.0) throw std::invalid_argument("weights sum to zero");
  // Skip the division when already normalized so that save/load round-trips
  // are byte-stable.
  if (std::abs(total - 1.0) > 1e-12) rates_ /= total;
  if (grid_) {
    if (grid_->width <= 0 || grid_->height <= 0)
      throw std::invalid_argument("grid dimensions must be positive");
    if (static_cast<std::int64_t>(grid_->width) * grid_->height !=
        embeddings_.rows())
      throw std::invalid_argument("grid shape does not match item count");
  }
}

Catalog Catalog::make_grid(int width, int height, Eigen::ArrayXd weights) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("grid dimensions must be positive");
  const std::int64_t n = static_cast<std::int64_t>(width) * height;
  Eigen::MatrixXd emb(n, 2);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const std::int64_t id = static_cast<std::int64_t>(y) * width + x;
      emb(id, 0) = x;
      emb(id, 1) = y;
    }
  return Catalog(std::move(emb), std::move(weights), GridShape{width, height});
}

namespace {

// Angle of the displacement vector in [0, 2pi), starting from the positive
// x-axis and turning counterclockwise.
double ccw_angle(double dx, double dy) {
  const double a = std::atan2(dy, dx);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

struct Candidate {
  ItemId item;
  double dist_sq;
  double tie_key;
};

void sort_candidates(std::vector<Candidate>& cands) {
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
              if (a.tie_key != b.tie_key) return a.tie_key < b.tie_key;
              return a.item < b.item;
            });
}

std::vector<Neighbor> finish_list(ItemId n, std::vector<Candidate>& cands) {
  sort_candidates(cands);
  std::vector<Neighbor> list;
  list.reserve(cands.size() + 1);
  list.push_back(Neighbor{n, 0.0});
  for (const Candidate& c : cands)
    list.push_back(Neighbor{c.item, std::sqrt(c.dist_sq)});
  return list;
}

}  // namespace

NeighborIndex build_neighbor_index(const Catalog& catalog, double d,
                                   TieBreak tie_break) {
  if (d < 0.0) throw std::invalid_argument("similarity threshold must be >= 0");
  if (tie_break == TieBreak::counterclockwise && catalog.dim() != 2)
    throw std::invalid_argument(
        "counterclockwise tie-break requires 2-D embeddings");

  const ItemId n_items = catalog.size();
  const double d_sq = d * d;
  const Eigen::MatrixXd& emb = catalog.embeddings();
  std::vector<std::vector<Neighbor>> lists(n_items);

  auto tie_key = [&](ItemId n, ItemId m) {
    if (tie_break == TieBreak::counterclockwise)
      return ccw_angle(emb(m, 0) - emb(n, 0), emb(m, 1) - emb(n, 1));
    return static_cast<double>(m);
  };

  if (catalog.grid()) {
    // Exact prefilter: |dx| <= d and |dy| <= d bound the Euclidean ball.
    const auto [width, height] = *catalog.grid();
    const int r = static_cast<int>(std::floor(d));
    std::vector<Candidate> cands;
    for (ItemId n = 0; n < n_items; ++n) {
      const int x = n % width;
      const int y = n / width;
      cands.clear();
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= height) continue;
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= width) continue;
          if (dx == 0 && dy == 0) continue;
          const double dist_sq = static_cast<double>(dx) * dx +
                                 static_cast<double>(dy) * dy;
          if (dist_sq > d_sq) continue;
          const ItemId m = static_cast<ItemId>(yy) * width + xx;
          cands.push_back(Candidate{m, dist_sq, tie_key(n, m)});
        }
      }
      lists[n] = finish_list(n, cands);
    }
  } else {
    std::vector<Candidate> cands;
    for (ItemId n = 0; n < n_items; ++n) {
      cands.clear();
      for (ItemId m = 0; m < n_items; ++m) {
        if (m == n) continue;
        const double dist_sq = (emb.row(n) - emb.row(m)).squaredNorm();
        if (dist_sq > d_sq) continue;
        cands.push_back(Candidate{m, dist_sq, tie_key(n, m)});
      }
      lists[n] = finish_list(n, cands);
    }
  }

  return NeighborIndex(d, tie_break, std::move(lists));
}

std::vector<ItemId> closer_set(const NeighborIndex& index, ItemId n, ItemId i,
                               bool closed) {
  const std::vector<Neighbor>& list = index.list(n);
  std::vector<ItemId> result;
  for (const Neighbor& entry : list) {
    if (entry.item == i) {
      if (!closed && !result.empty() && result.front() == n)
        result.erase(result.begin());
      return result;
    }
    result.push_back(entry.item);
  }
  throw std::invalid_argument("item is not in the queried neighborhood");
}

QModel::QModel(std::vector<QStep> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw std::invalid_argument("q model needs >= 1 step");
  if (steps_.front().probability != 1.0)
    throw std::invalid_argument("q(0) must equal 1");
  double prev_dist = -1.0;
  double prev_prob = 1.0;
  for (const QStep& s : steps_) {
    if (!(s.distance >= 0.0) || !std::isfinite(s.distance))
      throw std::invalid_argument("q step distances must be nonnegative");
    if (s.distance <= prev_dist)
      throw std::invalid_argument("q step distances must be increasing");
    if (s.probability < 0.0 || s.probability > 1.0)
      throw std::invalid_argument("q values must be in [0, 1]");
    if (s.probability > prev_prob)
      throw std::invalid_argument("q must be nonincreasing in distance");
    prev_dist = s.distance;
    prev_prob = s.probability;
  }
}

QModel QModel::exact_within(double d) {
  return QModel({QStep{d, 1.0}});
}

double QModel::operator()(double dist) const {
  for (const QStep& s : steps_)
    if (dist <= s.distance) return s.probability;
  return 0.0;
}

}  // namespace simcache
