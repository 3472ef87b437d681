#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace simcache {

using ItemId = std::int32_t;

/// Dimensions of a rectangular grid catalog. Item ids map to coordinates as
/// id = y * width + x, and the embedding of an item is (x, y).
struct GridShape {
  int width = 0;
  int height = 0;
};

/// Immutable item universe: one embedding row per item plus normalized
/// request probabilities. Dissimilarity is the Euclidean distance between
/// embeddings.
class Catalog {
 public:
  /// Builds a catalog from raw embeddings (one row per item) and nonnegative
  /// weights. Weights are normalized to probabilities; the time unit of all
  /// downstream rates is the mean interarrival time.
  Catalog(Eigen::MatrixXd embeddings, Eigen::ArrayXd weights,
          std::optional<GridShape> grid = std::nullopt);

  /// Grid catalog with embeddings (x, y), id = y * width + x.
  static Catalog make_grid(int width, int height, Eigen::ArrayXd weights);

  ItemId size() const { return static_cast<ItemId>(embeddings_.rows()); }
  int dim() const { return static_cast<int>(embeddings_.cols()); }

  const Eigen::MatrixXd& embeddings() const { return embeddings_; }
  const Eigen::ArrayXd& rates() const { return rates_; }
  const std::optional<GridShape>& grid() const { return grid_; }

  double distance(ItemId a, ItemId b) const {
    return (embeddings_.row(a) - embeddings_.row(b)).norm();
  }

 private:
  Eigen::MatrixXd embeddings_;  // N x D
  Eigen::ArrayXd rates_;        // normalized, sums to 1
  std::optional<GridShape> grid_;
};

/// Order of same-distance neighbors inside a neighborhood list.
enum class TieBreak {
  by_id,             // ascending item id
  counterclockwise,  // 2-D only: angle of the displacement vector in [0, 2pi)
};

struct Neighbor {
  ItemId item;
  double distance;

  bool operator==(const Neighbor&) const = default;
};

/// Per-item neighborhoods within the similarity threshold d, each sorted by
/// (distance, tie rank) with the item itself first at distance 0. The sort
/// key is a strict total order, so every list prefix is well defined.
class NeighborIndex {
 public:
  NeighborIndex(double threshold, TieBreak tie_break,
                std::vector<std::vector<Neighbor>> lists)
      : threshold_(threshold), tie_break_(tie_break), lists_(std::move(lists)) {}

  double threshold() const { return threshold_; }
  TieBreak tie_break() const { return tie_break_; }
  ItemId size() const { return static_cast<ItemId>(lists_.size()); }
  const std::vector<Neighbor>& list(ItemId n) const { return lists_[n]; }

 private:
  double threshold_;
  TieBreak tie_break_;
  std::vector<std::vector<Neighbor>> lists_;
};

/// Builds the neighbor index: for every item n, all items m with
/// dis(n, m) <= d. Brute-force O(N^2) in general; grid catalogs use an exact
/// bounding-box prefilter. Construction is deterministic.
///
/// Throws std::invalid_argument for d < 0, an empty catalog, or a
/// counterclockwise tie-break on a non-2-D catalog.
NeighborIndex build_neighbor_index(const Catalog& catalog, double d,
                                   TieBreak tie_break);

/// Items of list(n) strictly closer to n than i, i.e. the list prefix before
/// i. The open variant excludes n itself; the closed variant keeps it. For
/// i == n both variants are empty. Throws std::invalid_argument if i is not
/// in list(n).
std::vector<ItemId> closer_set(const NeighborIndex& index, ItemId n, ItemId i,
                               bool closed);

struct QStep {
  double distance;
  double probability;
};

/// Approximation probability as a nonincreasing step function of distance:
/// q(x) is the probability of the first step whose distance is >= x, and 0
/// beyond the last step. q(0) = 1 always.
class QModel {
 public:
  /// Validates: distances strictly increasing and nonnegative, probabilities
  /// nonincreasing in [0, 1], first probability exactly 1.
  explicit QModel(std::vector<QStep> steps);

  /// q = 1 up to distance d, 0 beyond (the always-serve policy).
  static QModel exact_within(double d);

  double operator()(double dist) const;
  const std::vector<QStep>& steps() const { return steps_; }

 private:
  std::vector<QStep> steps_;
};

}  // namespace simcache
