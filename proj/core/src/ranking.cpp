#include "sleevemap/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sleevemap {

std::vector<double> pagerank(const LaidOutGraph& g, double damping, double tol, int maxIter) {
  const std::size_t n = g.nodeCount();
  if (n == 0) return {};
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : g.edges) {
    ++degree[e.source];
    ++degree[e.target];
  }
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, uniform), next(n);
  for (int iter = 0; iter < maxIter; ++iter) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (degree[v] == 0) dangling += rank[v];
    }
    const double base = (1.0 - damping) * uniform + damping * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (const auto& e : g.edges) {
      next[e.target] += damping * rank[e.source] / static_cast<double>(degree[e.source]);
      next[e.source] += damping * rank[e.target] / static_cast<double>(degree[e.target]);
    }
    const double sum = std::accumulate(next.begin(), next.end(), 0.0);
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= sum;
      delta += std::abs(next[v] - rank[v]);
    }
    rank.swap(next);
    if (delta < tol) break;
  }
  return rank;
}

std::vector<NodeIndex> rankOrder(std::span<const double> scores) {
  std::vector<NodeIndex> order(scores.size());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeIndex a, NodeIndex b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<NodeIndex> levelPrefix(std::span<const NodeIndex> order, int k) {
  if (k < 0) throw ParameterError("level depth must be non-negative");
  std::size_t len = order.size();
  for (int i = 0; i < k && len > 1; ++i) len = (len + 1) / 2;  // ceil(ceil(n/2^i)/2) = ceil(n/2^(i+1))
  if (order.empty()) len = 0;
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len)};
}

SpatialHash::SpatialHash(double cellSize) : cell_(cellSize) {
  if (!(cellSize > 0.0) || !std::isfinite(cellSize)) throw ParameterError("spatial hash cell size must be positive");
}

std::int64_t SpatialHash::cellOf(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

std::uint64_t SpatialHash::key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
         static_cast<std::uint32_t>(cy);
}

void SpatialHash::insert(std::size_t id, const Rect& box) {
  const Point c = box.center();
  cells_[key(cellOf(c.x), cellOf(c.y))].push_back(id);
  ++count_;
}

std::vector<std::size_t> SpatialHash::neighbors(const Rect& box) const {
  std::vector<std::size_t> out;
  const Point c = box.center();
  const std::int64_t cx = cellOf(c.x), cy = cellOf(c.y);
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      const auto it = cells_.find(key(cx + dx, cy + dy));
      if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  return out;
}

namespace {

// Largest scale of `box` about its center that keeps its interior off `other`.
double scaleBound(const Rect& box, const Rect& other) {
  const Point c = box.center(), o = other.center();
  const double hx = box.width() * 0.5, hy = box.height() * 0.5;
  const double sx = (std::abs(c.x - o.x) - other.width() * 0.5) / hx;
  const double sy = (std::abs(c.y - o.y) - other.height() * 0.5) / hy;
  return std::max(sx, sy);
}

}  // namespace

LevelSelection selectWithAdaptiveScale(std::span<const NodeIndex> prefix, std::span<const Rect> boxes, int k,
                                       double margin) {
  LevelSelection out;
  out.depth = k;
  if (prefix.empty()) return out;
  const double top = std::ldexp(1.0, k);
  double extent = 0.0;
  for (NodeIndex v : prefix) extent = std::max({extent, boxes[v].width(), boxes[v].height()});
  SpatialHash hash(extent * top);

  std::vector<Rect> accepted;
  double prev = top;
  for (NodeIndex v : prefix) {
    double s = prev;
    if (!accepted.empty()) {
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t id : hash.neighbors(boxes[v].scaled(prev))) {
        bound = std::min(bound, scaleBound(boxes[v], accepted[id]));
      }
      if (!(bound > 1.0)) {
        out.dropped.push_back(v);
        continue;
      }
      if (bound <= prev) s = std::max(1.0, bound * (1.0 - margin));
    }
    const Rect scaled = boxes[v].scaled(s);
    hash.insert(accepted.size(), scaled);
    accepted.push_back(scaled);
    out.selected.push_back({v, s});
    prev = s;
  }
  return out;
}

}  // namespace sleevemap
