#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "sleevemap/graph_model.hpp"

namespace sleevemap {

/// Power-iteration PageRank over the symmetrized edge list. Dangling mass is
/// spread uniformly. Scores sum to one.
std::vector<double> pagerank(const LaidOutGraph& g, double damping = 0.85, double tol = 1e-10,
                             int maxIter = 200);

/// Node indices by descending score, ties by index.
std::vector<NodeIndex> rankOrder(std::span<const double> scores);

/// First ceil(n / 2^k) entries of the rank order.
std::vector<NodeIndex> levelPrefix(std::span<const NodeIndex> order, int k);

struct ScaledNode {
  NodeIndex node = 0;
  double scale = 1.0;
};

struct LevelSelection {
  int depth = 0;
  std::vector<ScaledNode> selected;  // rank order
  std::vector<NodeIndex> dropped;
};

/// Uniform grid keyed by the cell of each box center. Sound for boxes no larger
/// than one cell on either axis.
class SpatialHash {
 public:
  explicit SpatialHash(double cellSize);

  void insert(std::size_t id, const Rect& box);
  /// Ids registered in the 3x3 block of cells around the center of `box`.
  std::vector<std::size_t> neighbors(const Rect& box) const;

  double cellSize() const { return cell_; }
  std::size_t size() const { return count_; }

 private:
  std::int64_t cellOf(double v) const;
  static std::uint64_t key(std::int64_t cx, std::int64_t cy);

  double cell_;
  std::size_t count_ = 0;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

/// Walks the prefix in rank order. The first node gets scale 2^k; every later
/// node gets the largest scale up to its predecessor's that keeps its box
/// (scaled about its center) clear of the accepted boxes, or is dropped when
/// even scale 1 overlaps. Feasible scales are shaved by `margin` (relative) so
/// accepted boxes keep a gap.
LevelSelection selectWithAdaptiveScale(std::span<const NodeIndex> prefix, std::span<const Rect> boxes, int k,
                                       double margin = 1e-3);

}  // namespace sleevemap
