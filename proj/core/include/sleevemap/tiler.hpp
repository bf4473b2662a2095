#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sleevemap/graph_model.hpp"
#include "sleevemap/ranking.hpp"
#include "sleevemap/sleeve_router.hpp"

namespace sleevemap {

struct TileKey {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  friend auto operator<=>(const TileKey&, const TileKey&) = default;
};

/// Quadtree over a fixed square. Column x grows with world x and row y with world y.
class TileGrid {
 public:
  TileGrid() = default;
  explicit TileGrid(const Rect& root);

  /// Smallest square of power-of-two side centered on `bounds`.
  static TileGrid around(const Rect& bounds);

  const Rect& root() const { return root_; }
  double side() const { return side_; }
  double tileSide(int z) const;
  /// World coordinate of grid line i at level z (0 <= i <= 2^z).
  double lineX(int z, std::uint32_t i) const;
  double lineY(int z, std::uint32_t i) const;
  Rect tileRect(int z, TileKey key) const;
  /// Tile holding p; points on a shared side go to the lower index. Clamped to the grid.
  TileKey tileOf(int z, const Point& p) const;

 private:
  Rect root_;
  double side_ = 1.0;
};

struct EdgeClip {
  Polyline curve;
  std::vector<EdgeIndex> edges;
};

struct TileNode {
  NodeIndex node = 0;
  Rect box;  // at the level's scale
  double scale = 1.0;
};

struct TileLabel {
  std::string text;
  Point anchor;
  bool onEdge = false;
  std::size_t ref = 0;  // node or edge index
};

struct Arrowhead {
  Point tip;
  Point dir;  // unit
  EdgeIndex edge = 0;
};

struct TileData {
  std::vector<TileNode> nodes;
  std::vector<EdgeClip> clips;
  std::vector<TileLabel> labels;
  std::vector<Arrowhead> arrowheads;

  std::size_t elementCount() const { return nodes.size() + clips.size() + labels.size() + arrowheads.size(); }
  bool empty() const { return elementCount() == 0; }
};

struct TileLevel {
  std::map<TileKey, TileData> tiles;  // absent tiles are empty
  std::vector<ScaledNode> nodes;      // rendered nodes of the level
  std::vector<EdgeIndex> edges;       // edges routed on the level

  std::size_t maxElements() const;
  std::size_t elementCount() const;
};

struct TilePyramid {
  TileGrid grid;
  std::size_t capacity = 0;
  std::vector<TileLevel> levels;  // index z; levels.size() = Z + 1

  int finestLevel() const { return static_cast<int>(levels.size()) - 1; }
};

/// Cuts a polyline at every point where it crosses or lands on one of the
/// vertical lines x = xs[i] or horizontal lines y = ys[j]. Cut points carry the
/// line coordinate exactly. Zero-length pieces are dropped.
std::vector<Polyline> cutAtAxisLines(const Polyline& curve, std::span<const double> xs, std::span<const double> ys);

/// Pieces of the curve inside the rectangle, each meeting its boundary only at its ends.
std::vector<Polyline> clipToRect(const Polyline& curve, const Rect& rect);

/// Splits a clip by the two midlines of its tile. Quadrant index is qx + 2*qy
/// with qx, qy = 0 on the low side; a piece lying on a midline goes low.
std::vector<std::pair<int, EdgeClip>> splitClipByMidlines(const EdgeClip& clip, const Rect& tile);
/// Same with the midlines given explicitly, for grids whose lines are computed apart from the rects.
std::vector<std::pair<int, EdgeClip>> splitClipAt(const EdgeClip& clip, double midX, double midY);

/// Merges clips whose unordered endpoint pairs agree within `tol`. The first
/// clip keeps its geometry and collects the edge lists in order.
void bundleClips(TileData& tile, double tol);

/// True when every vertex lies in the closed rectangle and only the two end
/// vertices touch its boundary.
bool meetsBoundaryOnlyAtEnds(const Polyline& curve, const Rect& rect);

/// Labels for nodes (at the center) and for edges (at the arc-length midpoint of
/// the route), and one arrowhead per route end when `arrowheads` is set.
/// Empty label texts are skipped.
struct Annotations {
  std::vector<TileLabel> labels;
  std::vector<Arrowhead> arrowheads;
};
Annotations placeLabelsAndArrowheads(const LaidOutGraph& g, std::span<const ScaledNode> nodes,
                                     std::span<const Route> routes, bool arrowheads);

enum class StopReason { Capacity, MinTileSize, MemoryBudget };
std::string_view stopReasonName(StopReason reason);

struct PyramidOptions {
  std::size_t capacity = 500;
  double minTileFactor = 10.0;
  std::uint64_t memoryBudget = std::uint64_t{4} << 30;
  double padding = 0.0;  // <= 0 picks defaultPadding(g)
  RoutingMode mode = RoutingMode::VcDijkstra;
  int threads = 1;
  bool arrowheads = false;
  int maxLevels = 24;
};

inline constexpr double kElementBytes = 200.0;

struct GrowthResult {
  TilePyramid pyramid;  // unfiltered levels
  StopReason stop = StopReason::Capacity;
  std::size_t usedElements = 0;
};

/// Grows the unfiltered pyramid one level at a time until every tile holds at
/// most `capacity` elements, the tiles get smaller than minTileFactor times the
/// average node size on both axes, or the element budget runs out.
GrowthResult growPyramid(const LaidOutGraph& g, std::span<const Route> routes, const PyramidOptions& options);

struct LevelReport {
  int z = 0;
  std::size_t tiles = 0;
  std::size_t elements = 0;
  std::size_t maxElements = 0;
  std::size_t nodes = 0;
  std::size_t dropped = 0;
  std::size_t edges = 0;
  std::size_t failures = 0;
  std::size_t obstacleWarnings = 0;
  RoutingStats routing;
  double tilingSeconds = 0.0;
};

struct BuildReport {
  StopReason stop = StopReason::Capacity;
  int levelsBuilt = 0;
  std::size_t maxPerTile = 0;
  int maxTileLevel = 0;
  std::size_t unfilteredFinestMax = 0;  // max elements per tile of the unfiltered finest level
  double padding = 0.0;
  double routingSeconds = 0.0;
  double tilingSeconds = 0.0;
  std::vector<LevelReport> levels;
};

struct BuildResult {
  TilePyramid pyramid;
  BuildReport report;
};

/// The whole pipeline: route on the full graph, grow to fix Z, then rebuild the
/// coarser levels from PageRank selections with their own obstacles and routes.
BuildResult buildPyramid(const LaidOutGraph& g, const PyramidOptions& options);

struct PyramidStats {
  int levelsBuilt = 0;
  std::size_t maxPerTile = 0;
  int maxTileLevel = 0;
  std::vector<std::size_t> tilesPerLevel;
  std::vector<std::size_t> maxPerLevel;
};

PyramidStats pyramidStats(const TilePyramid& p);

}  // namespace sleevemap
